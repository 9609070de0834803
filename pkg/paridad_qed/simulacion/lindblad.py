"""
Integrador de la ecuación maestra luz-átomo en un espacio de Fock truncado.

Dos generadores:

- completo: átomo de tres niveles |0>, |1>, |e> acoplado al modo con
  H = g (a s^+ + a^+ s) + Delta s^+ s, s = |1><e|, y decaimiento Gamma
- reducido: átomo de dos niveles tras eliminar |e>, con corrimiento
  -Delta g^2/((Gamma/2)^2 + Delta^2) a^+a |1><1| y pérdida de fotones a tasa
  Gamma g^2/((Gamma/2)^2 + Delta^2) cuando el átomo está en |1>

El orden de la base es átomo mayor: |atomo> (x) |n>. La integración es RK4
de paso fijo; después de cada paso se simetriza la matriz y cada
VERIFICAR_CADA pasos se verifican los invariantes del estado.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .conf import ajuste
from .excepciones import CorteInsuficiente, ErrorDeIntegracion, ParametroInvalido

logger = logging.getLogger(__name__)

GENERADORES = ('full', 'reduced')
TOL_TRAZA = 1e-9
TOL_HERMITICA = 1e-10
TOL_POSITIVIDAD = -1e-8
# pasos RK4 entre verificaciones de invariantes
VERIFICAR_CADA = 50


@dataclass(frozen=True)
class LightAtomParams:
    g: float
    Gamma: float
    Delta: float = 0.0

    def __post_init__(self):
        if self.g < 0 or self.Gamma <= 0:
            raise ParametroInvalido('Se requiere g >= 0 y Gamma > 0.')

    @classmethod
    def from_cavity(cls, c):
        return cls(g=c.g, Gamma=c.Gamma, Delta=c.Delta)

    @property
    def denominador(self):
        return self.Gamma ** 2 / 4.0 + self.Delta ** 2

    def condition_ratio(self, xi0):
        """g^2 |xi|^2 / (Gamma^2/4 + Delta^2)."""
        return self.g ** 2 * abs(xi0) ** 2 / self.denominador


@dataclass(frozen=True)
class IntegratorConfig:
    cutoff: int = None
    h: float = None
    scheme: str = 'rk4'
    generator: str = 'full'

    def __post_init__(self):
        if self.cutoff is None:
            object.__setattr__(self, 'cutoff', int(ajuste('FOCK_CUTOFF')))
        if self.cutoff < 4:
            raise ParametroInvalido(f'El corte de Fock debe ser >= 4 (corte={self.cutoff}).')
        if self.h is not None and self.h <= 0:
            raise ParametroInvalido(f'El paso h debe ser positivo (h={self.h}).')
        if self.scheme != 'rk4':
            raise ParametroInvalido(f'Esquema no soportado: {self.scheme}')
        if self.generator not in GENERADORES:
            raise ParametroInvalido(f'Generador desconocido: {self.generator}')

    def step_for(self, params):
        if self.h is not None:
            return self.h
        tasa = max(params.Gamma, abs(params.Delta), params.g * math.sqrt(self.cutoff), 1e-12)
        return 1e-3 / tasa


# ========== ESTADOS ==========

def coherent_amplitudes(xi, cutoff):
    amplitudes = np.zeros(cutoff, dtype=complex)
    amplitudes[0] = 1.0
    for n in range(1, cutoff):
        amplitudes[n] = amplitudes[n - 1] * xi / math.sqrt(n)
    return amplitudes / np.linalg.norm(amplitudes)


def adequate_cutoff(xi, cutoff=None):
    """Duplica el corte hasta que la población del último nivel sea < TAIL_TOL."""
    corte = cutoff or int(ajuste('FOCK_CUTOFF'))
    maximo = int(ajuste('FOCK_CUTOFF_MAX'))
    tol = ajuste('TAIL_TOL')
    while True:
        cola = abs(coherent_amplitudes(xi, corte)[-1]) ** 2
        if cola < tol:
            return corte
        if corte * 2 > maximo:
            raise CorteInsuficiente(f'|xi|^2={abs(xi) ** 2:.3g} necesita un corte mayor que {maximo}.')
        logger.warning(f'Corte de Fock {corte} insuficiente (cola {cola:.2e}); se duplica')
        corte *= 2


@dataclass
class DensityMatrix:
    """Matriz densidad átomo (x) campo con base átomo mayor."""
    data: np.ndarray
    atom_levels: int
    cutoff: int
    time: float = 0.0
    max_excited: float = 0.0

    @classmethod
    def product_state(cls, atom_level, xi0, atom_levels=3, cutoff=None):
        if not 0 <= atom_level < atom_levels:
            raise ParametroInvalido(f'Nivel atómico {atom_level} fuera de rango.')
        corte = adequate_cutoff(xi0, cutoff)
        atomo = np.zeros(atom_levels, dtype=complex)
        atomo[atom_level] = 1.0
        psi = np.kron(atomo, coherent_amplitudes(xi0, corte))
        return cls(np.outer(psi, psi.conj()), atom_levels, corte)

    @property
    def dim(self):
        return self.atom_levels * self.cutoff

    def trace(self):
        return np.trace(self.data).real

    def hermiticity_error(self):
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh((self.data + self.data.conj().T) / 2.0)))

    def purity(self):
        return float(np.real(np.trace(self.data @ self.data)))

    def field_state(self):
        r = self.data.reshape(self.atom_levels, self.cutoff, self.atom_levels, self.cutoff)
        return np.einsum('anam->nm', r)

    def atom_population(self, level):
        r = self.data.reshape(self.atom_levels, self.cutoff, self.atom_levels, self.cutoff)
        return float(np.real(np.trace(r[level, :, level, :])))

    def field_expectation(self):
        """<a> del modo."""
        return complex(np.trace(_destruccion(self.cutoff) @ self.field_state()))

    def field_purity(self):
        campo = self.field_state()
        return float(np.real(np.trace(campo @ campo)))

    def tail_population(self):
        return float(np.real(self.field_state()[-1, -1]))


# ========== GENERADORES ==========

def _destruccion(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def _proyector(nivel, niveles):
    p = np.zeros((niveles, niveles), dtype=complex)
    p[nivel, nivel] = 1.0
    return p


def _generador_completo(params, cutoff):
    a = np.kron(np.eye(3), _destruccion(cutoff))
    sigma = np.zeros((3, 3), dtype=complex)
    sigma[1, 2] = 1.0
    s = np.kron(sigma, np.eye(cutoff))
    H = params.g * (a @ s.conj().T + a.conj().T @ s) + params.Delta * (s.conj().T @ s)
    return H, [math.sqrt(params.Gamma) * s]


def _generador_reducido(params, cutoff):
    a = _destruccion(cutoff)
    p1 = _proyector(1, 2)
    corrimiento = -params.Delta * params.g ** 2 / params.denominador
    tasa = params.Gamma * params.g ** 2 / params.denominador
    H = corrimiento * np.kron(p1, a.conj().T @ a)
    return H, [math.sqrt(tasa) * np.kron(p1, a)]


class _Lindblad:
    """Lado derecho de d rho/dt con el Hamiltoniano no hermítico precalculado."""

    def __init__(self, H, saltos):
        self.saltos = saltos
        self.saltos_dag = [L.conj().T for L in saltos]
        anti = sum((Ld @ L for L, Ld in zip(saltos, self.saltos_dag)), np.zeros_like(H))
        self.H_nh = H - 0.5j * anti
        self.H_nh_dag = self.H_nh.conj().T

    def __call__(self, rho):
        d = -1j * (self.H_nh @ rho - rho @ self.H_nh_dag)
        for L, Ld in zip(self.saltos, self.saltos_dag):
            d += L @ rho @ Ld
        return d

    def rk4_step(self, rho, h):
        k1 = self(rho)
        k2 = self(rho + 0.5 * h * k1)
        k3 = self(rho + 0.5 * h * k2)
        k4 = self(rho + h * k3)
        nuevo = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return 0.5 * (nuevo + nuevo.conj().T)


def _verificar(rho, t):
    error_traza = abs(rho.trace() - 1.0)
    if error_traza > TOL_TRAZA * max(1.0, t):
        raise ErrorDeIntegracion(f'Traza fuera de tolerancia: |tr - 1| = {error_traza:.3e}')
    if rho.hermiticity_error() > TOL_HERMITICA:
        raise ErrorDeIntegracion('La matriz densidad dejó de ser hermítica.')
    minimo = rho.min_eigenvalue()
    if minimo < TOL_POSITIVIDAD:
        raise ErrorDeIntegracion(f'Autovalor negativo {minimo:.3e}; reducir el paso h.')
    if rho.tail_population() > ajuste('TAIL_TOL'):
        raise CorteInsuficiente(f'Población {rho.tail_population():.2e} en el último nivel de Fock.')


def _pasos(t_end, h):
    if t_end < 0:
        raise ParametroInvalido(f't_end debe ser >= 0 (t_end={t_end}).')
    n = int(math.ceil(t_end / h - 1e-9))
    return n, (t_end / n if n else 0.0)


def _integrar(rho0, lindblad, t_end, h, excitado=None):
    n, paso = _pasos(t_end, h)
    rho = rho0.data.copy()
    maximo = rho0.max_excited
    estado = DensityMatrix(rho, rho0.atom_levels, rho0.cutoff, rho0.time, maximo)
    for k in range(n):
        rho = lindblad.rk4_step(rho, paso)
        estado = DensityMatrix(rho, rho0.atom_levels, rho0.cutoff, rho0.time + (k + 1) * paso, maximo)
        if excitado is not None:
            maximo = max(maximo, estado.atom_population(excitado))
            estado.max_excited = maximo
        if (k + 1) % VERIFICAR_CADA == 0:
            _verificar(estado, estado.time)
    _verificar(estado, t_end)
    return estado


def evolve_full(rho0, params, t_end, config=None):
    """Evoluciona con el átomo de tres niveles; registra la población máxima de |e>."""
    if rho0.atom_levels != 3:
        raise ParametroInvalido('El generador completo necesita un átomo de tres niveles.')
    config = config or IntegratorConfig(cutoff=rho0.cutoff)
    H, saltos = _generador_completo(params, rho0.cutoff)
    logger.debug(f'Integración completa: corte {rho0.cutoff}, t_end {t_end}')
    return _integrar(rho0, _Lindblad(H, saltos), t_end, config.step_for(params), excitado=2)


def evolve_reduced(rho0, params, t_end, config=None):
    if rho0.atom_levels != 2:
        raise ParametroInvalido('El generador reducido necesita un átomo de dos niveles.')
    config = config or IntegratorConfig(cutoff=rho0.cutoff, generator='reduced')
    H, saltos = _generador_reducido(params, rho0.cutoff)
    logger.debug(f'Integración reducida: corte {rho0.cutoff}, t_end {t_end}')
    return _integrar(rho0, _Lindblad(H, saltos), t_end, config.step_for(params))


@dataclass(frozen=True)
class EliminationReport:
    condition_ratio: float
    field_deviation: float
    population_deviation: float
    purity_deviation: float
    max_excited: float
    cutoff: int
    steps: int


def compare_elimination(params, xi0, t_end, config=None):
    """
    Integra ambos generadores en paralelo (mismo paso) desde |1> (x) |xi0> y
    devuelve las desviaciones máximas de <a> (relativa a |xi0|), de la
    población de |1> y de la pureza del campo.
    """
    corte = adequate_cutoff(xi0, config.cutoff if config else None)
    config = config or IntegratorConfig(cutoff=corte)
    h = config.step_for(params)
    n, paso = _pasos(t_end, h)

    completo = DensityMatrix.product_state(1, xi0, atom_levels=3, cutoff=corte)
    reducido = DensityMatrix.product_state(1, xi0, atom_levels=2, cutoff=corte)
    gen_c = _Lindblad(*_generador_completo(params, corte))
    gen_r = _Lindblad(*_generador_reducido(params, corte))
    escala = abs(xi0) if xi0 != 0 else 1.0

    rho_c, rho_r = completo.data, reducido.data
    d_campo = d_pob = d_pureza = max_e = 0.0
    for k in range(n):
        rho_c = gen_c.rk4_step(rho_c, paso)
        rho_r = gen_r.rk4_step(rho_r, paso)
        c = DensityMatrix(rho_c, 3, corte)
        r = DensityMatrix(rho_r, 2, corte)
        d_campo = max(d_campo, abs(c.field_expectation() - r.field_expectation()) / escala)
        d_pob = max(d_pob, abs(c.atom_population(1) - r.atom_population(1)))
        d_pureza = max(d_pureza, abs(c.field_purity() - r.field_purity()))
        max_e = max(max_e, c.atom_population(2))
        if (k + 1) % VERIFICAR_CADA == 0:
            _verificar(c, (k + 1) * paso)
            _verificar(r, (k + 1) * paso)

    _verificar(DensityMatrix(rho_c, 3, corte), t_end)
    _verificar(DensityMatrix(rho_r, 2, corte), t_end)
    reporte = EliminationReport(
        condition_ratio=params.condition_ratio(xi0),
        field_deviation=d_campo,
        population_deviation=d_pob,
        purity_deviation=d_pureza,
        max_excited=max_e,
        cutoff=corte,
        steps=n,
    )
    logger.info(f'Eliminación adiabática: cociente {reporte.condition_ratio:.3g}, '
                f'desviación de <a> {reporte.field_deviation:.3g}')
    return reporte
