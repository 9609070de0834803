"""
Estado estacionario de la red de cavidades y lazo.

Para cada cavidad se calcula el factor de ida y vuelta f y el coeficiente de
reflexión F según el backend elegido:

- EXACT_MIRROR_ALGEBRA: F = (f - r)/(1 - r f), con f completo
- HIGH_FINESSE_FIRST_ORDER: F desarrollado a primer orden en t**2 y tau
- NONRESONANT_LIMIT: F = (D + iC)/(D - iC) para el átomo en |1>

Con los cuatro pares de coeficientes se resuelve el lazo cerrado para cada
estado (i1, i2) y se obtienen todas las amplitudes etiquetadas de la red.
"""

import cmath
import logging
import math
from dataclasses import dataclass

from .conf import ajuste
from .core import ESTADOS, Backend, derived_params
from .excepciones import ParametroInvalido, Singularidad

logger = logging.getLogger(__name__)


# ========== COEFICIENTES DE UNA CAVIDAD ==========

def round_trip_factor(c, atom_state):
    """Factor complejo que adquiere el campo intracavidad en una vuelta."""
    if atom_state not in (0, 1):
        raise ParametroInvalido(f'Estado atómico inválido: {atom_state}')
    acople = c.g * c.g / (c.Gamma * c.Gamma / 4.0 + c.Delta * c.Delta) if atom_state == 1 else 0.0
    exponente = -(c.Gamma / 2.0 - 1j * c.Delta) * acople * c.tau - 1j * c.delta_cav * c.tau
    return math.sqrt(c.eta_cav) * cmath.exp(exponente)


def reflection_coefficient_from_factor(f, r):
    tol = ajuste('SINGULARITY_TOL')
    denominador = 1.0 - r * f
    if abs(denominador) < tol:
        raise Singularidad(f'Denominador de cavidad casi nulo: |1 - r f| = {abs(denominador):.3e}')
    return (f - r) / denominador


def reflection_coefficient_exact(c, atom_state):
    return reflection_coefficient_from_factor(round_trip_factor(c, atom_state), c.r_mirror)


def reflection_coefficient_expanded(C, D, atom_state):
    """F a primer orden, suponiendo la desintonía automática de la cavidad."""
    d = 1.0 if atom_state == 1 else 0.0
    base = 1.0 + D * D
    fase = 2.0 * D * C * (d - 0.5)
    return complex(base - 2.0 * C * d, fase) / complex(base + 2.0 * C * d, -fase)


def reflection_coefficient_nonresonant(C, D, atom_state):
    if D == 0:
        raise ParametroInvalido('El límite no resonante requiere D distinto de cero.')
    uno = complex(D, C) / complex(D, -C)
    return uno if atom_state == 1 else uno.conjugate()


def emission_prefactor(c, backend):
    """Tasa de emisión espontánea por fotón intracavidad (2 C kappa / (1 + D**2))."""
    C, D = derived_params(c)
    if backend == Backend.NONRESONANT_LIMIT:
        return 2.0 * C * c.kappa / (D * D)
    return 2.0 * C * c.kappa / (1.0 + D * D)


@dataclass(frozen=True)
class ReflectionCoefficients:
    """
    F[(q, i)] y f[(q, i)] para cavidad q y estado atómico i.

    f puede ser None cuando los F se dan directamente; en ese caso el campo
    intracavidad se calcula como (1 + F) zeta / sqrt(kappa tau).
    """
    F: dict
    f: dict
    backend: Backend

    @classmethod
    def from_round_trip_factors(cls, cfg, f):
        """F exactos a partir de factores de ida y vuelta impuestos."""
        F = {
            (q, i): reflection_coefficient_from_factor(f[(q, i)], cfg.cavity(q).r_mirror)
            for q in (1, 2) for i in (0, 1)
        }
        return cls(F=F, f=dict(f), backend=Backend.EXACT_MIRROR_ALGEBRA)

    @classmethod
    def from_reflections(cls, F, backend=Backend.HIGH_FINESSE_FIRST_ORDER):
        return cls(F=dict(F), f=None, backend=Backend(backend))


def reflection_coefficients(cfg):
    """Construye el mapa de coeficientes para el backend de la configuración."""
    f = {(q, i): round_trip_factor(cfg.cavity(q), i) for q in (1, 2) for i in (0, 1)}
    if cfg.backend == Backend.EXACT_MIRROR_ALGEBRA:
        return ReflectionCoefficients.from_round_trip_factors(cfg, f)

    F = {}
    for q in (1, 2):
        C, D = derived_params(cfg.cavity(q))
        for i in (0, 1):
            if cfg.backend == Backend.NONRESONANT_LIMIT:
                F[(q, i)] = reflection_coefficient_nonresonant(C, D, i)
            else:
                F[(q, i)] = reflection_coefficient_expanded(C, D, i)
    return ReflectionCoefficients(F=F, f=f, backend=cfg.backend)


# ========== AMPLITUDES CONDICIONALES ==========

@dataclass(frozen=True)
class AmplitudeSet:
    zeta1: complex
    zeta2: complex
    zeta3: complex
    zeta4: complex
    zeta5: complex
    xi1: complex
    xi2: complex
    beta: complex

    def xi(self, q):
        return self.xi1 if q == 1 else self.xi2


@dataclass(frozen=True)
class ConditionalAmplitudes:
    """Amplitudes de la red para los cuatro estados (i1, i2)."""
    alpha: complex
    coefficients: ReflectionCoefficients
    sets: dict
    tau1: float
    tau2: float

    def __getitem__(self, estado):
        return self.sets[estado]

    def beta(self, estado):
        return self.sets[estado].beta

    def tau(self, q):
        return self.tau1 if q == 1 else self.tau2


def _campo_intracavidad(cav, coef, q, i, entrada):
    if coef.backend == Backend.EXACT_MIRROR_ALGEBRA and coef.f is not None:
        return cav.t_mirror * entrada / (1.0 - cav.r_mirror * coef.f[(q, i)])
    return (1.0 + coef.F[(q, i)]) * entrada / math.sqrt(cav.kappa * cav.tau)


def solve_loop(cfg, coefficients=None):
    """
    Resuelve el lazo cerrado para los cuatro estados de los qubits.

    zeta2 = P t3 alpha / (1 - r3 P F1 F2 sqrt(eta3)) y
    beta = i (r3 - P F1 F2 sqrt(eta3)) / (1 - r3 P F1 F2 sqrt(eta3)) alpha.
    El producto F1 F2 se evalúa una sola vez para que los estados impares
    den resultados idénticos con cavidades iguales.
    """
    coef = coefficients if coefficients is not None else reflection_coefficients(cfg)
    loop = cfg.loop
    P = loop.P
    s = loop.sqrt_eta3
    alpha = loop.alpha
    tol = ajuste('SINGULARITY_TOL')

    conjuntos = {}
    for estado in ESTADOS:
        i1, i2 = estado
        F1 = coef.F[(1, i1)]
        F2 = coef.F[(2, i2)]
        producto = F1 * F2
        denominador = 1.0 - loop.r3 * P * producto * s
        if abs(denominador) < tol:
            raise Singularidad(
                f'Lazo casi singular en el estado {estado}: |1 - r3 P F1 F2 sqrt(eta3)| = {abs(denominador):.3e}',
                estado=estado,
            )
        zeta2 = P * loop.t3 * alpha / denominador
        zeta1 = loop.t3 * alpha / denominador
        zeta3 = -1j * F1 * zeta2
        zeta4 = 1j * s * zeta3
        zeta5 = -1j * F2 * zeta4
        beta = 1j * (loop.r3 - P * producto * s) / denominador * alpha
        conjuntos[estado] = AmplitudeSet(
            zeta1=zeta1,
            zeta2=zeta2,
            zeta3=zeta3,
            zeta4=zeta4,
            zeta5=zeta5,
            xi1=_campo_intracavidad(cfg.cavity1, coef, 1, i1, zeta2),
            xi2=_campo_intracavidad(cfg.cavity2, coef, 2, i2, zeta4),
            beta=beta,
        )
    logger.debug(f'Lazo resuelto con backend {coef.backend}: beta10={conjuntos[(1, 0)].beta:.6g}')
    return ConditionalAmplitudes(
        alpha=alpha,
        coefficients=coef,
        sets=conjuntos,
        tau1=cfg.cavity1.tau,
        tau2=cfg.cavity2.tau,
    )


def conditional_cavity_photon_number(amps, q, i1, i2):
    """Número medio de fotones |xi_q|**2 tau_q en la cavidad q."""
    return abs(amps[(i1, i2)].xi(q)) ** 2 * amps.tau(q)
