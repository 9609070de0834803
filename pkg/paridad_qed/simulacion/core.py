"""
Parámetros del sistema y verificación de débil excitación.

Este módulo define los objetos de valor que describen el montaje:

- CavityQubitParams: constantes de una cavidad con su átomo (g, Gamma, Delta,
  kappa, tau, espejo de entrada, eficiencia intracavidad, desintonía)
- LoopParams: constantes del lazo (divisor r3/t3, pérdidas eta3, fase psi,
  amplitud de entrada alpha)
- SystemConfig: las dos cavidades, el lazo y el backend de cálculo

Además expone derived_params() (cooperatividad C y desintonía reducida D) y
check_weak_driving(), que evalúa los tres factores de la condición de débil
excitación para cada cavidad y cada estado del átomo compañero.

Convención de unidades: todas las tasas se expresan en unidades de Gamma_1.
Todos los tipos son inmutables; las funciones son puras.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace

from django.db import models

from .conf import ajuste
from .excepciones import ConfiguracionInvalida, ParametroInvalido

logger = logging.getLogger(__name__)

# Estados de dos qubits (i1, i2) en el orden usado en tablas y reportes
ESTADOS = ((0, 0), (0, 1), (1, 0), (1, 1))
ESTADOS_IMPARES = ((1, 0), (0, 1))
ESTADOS_PARES = ((0, 0), (1, 1))

TOL_NORMALIZACION = 1e-12


class Backend(models.TextChoices):
    """Modelo usado para el coeficiente de reflexión de cada cavidad."""
    EXACT_MIRROR_ALGEBRA = 'exact', 'Álgebra exacta de espejos'
    HIGH_FINESSE_FIRST_ORDER = 'first_order', 'Alta fineza, primer orden'
    NONRESONANT_LIMIT = 'nonresonant_limit', 'Límite no resonante F=(D+iC)/(D-iC)'


def _finito(nombre, valor):
    if not math.isfinite(valor):
        raise ParametroInvalido(f'{nombre} no es finito ({valor}).')
    return valor


# ========== PARÁMETROS DE CAVIDAD ==========

@dataclass(frozen=True)
class CavityQubitParams:
    """
    Constantes de una cavidad con un átomo de tres niveles.

    kappa debe coincidir con t_mirror**2 / tau. Con auto_detuning activo,
    delta_cav se recalcula en cada construcción (también con replace()) para
    cumplir 2*delta/kappa = D*C/(1+D**2).
    """
    g: float
    Gamma: float
    Delta: float
    kappa: float
    tau: float
    r_mirror: float
    t_mirror: float
    eta_cav: float = 1.0
    delta_cav: float = 0.0
    auto_detuning: bool = True

    def __post_init__(self):
        for nombre in ('g', 'Gamma', 'Delta', 'kappa', 'tau', 'r_mirror',
                       't_mirror', 'eta_cav', 'delta_cav'):
            _finito(nombre, getattr(self, nombre))
        if self.g < 0:
            raise ParametroInvalido(f'g debe ser >= 0 (g={self.g}).')
        if self.Gamma <= 0 or self.kappa <= 0 or self.tau <= 0:
            raise ParametroInvalido('Gamma, kappa y tau deben ser positivos.')
        if not 0.0 <= self.r_mirror < 1.0 or self.t_mirror <= 0:
            raise ParametroInvalido(
                f'Espejo de entrada fuera de rango (r={self.r_mirror}, t={self.t_mirror}).')
        if abs(self.r_mirror ** 2 + self.t_mirror ** 2 - 1.0) > TOL_NORMALIZACION:
            raise ParametroInvalido('El espejo de entrada no cumple r**2 + t**2 = 1.')
        if abs(self.kappa - self.t_mirror ** 2 / self.tau) > 1e-10 * self.kappa:
            raise ParametroInvalido(
                f'kappa={self.kappa} no coincide con t**2/tau={self.t_mirror ** 2 / self.tau}.')
        if not 0.0 < self.eta_cav <= 1.0:
            raise ParametroInvalido(f'eta_cav debe estar en (0, 1] (eta_cav={self.eta_cav}).')

        C, D = derived_params(self)
        if self.auto_detuning:
            object.__setattr__(self, 'delta_cav', self.kappa * D * C / (2.0 * (1.0 + D * D)))

    @classmethod
    def from_dimensionless(cls, C, D, kappa=None, tau=None, Gamma=1.0,
                           eta_cav=1.0, auto_detuning=True, delta_cav=0.0):
        """Construye la cavidad a partir de C y D (g y Delta se deducen)."""
        kappa = ajuste('DEFAULT_KAPPA') if kappa is None else kappa
        tau = ajuste('DEFAULT_TAU') if tau is None else tau
        if C < 0 or Gamma <= 0 or kappa <= 0 or tau <= 0:
            raise ParametroInvalido('C >= 0 y Gamma, kappa, tau > 0 son obligatorios.')
        t2 = kappa * tau
        if t2 >= 1.0:
            raise ParametroInvalido(f'kappa*tau={t2} debe ser menor que 1 (transmisión del espejo).')
        return cls(
            g=math.sqrt(C * kappa * Gamma / 2.0),
            Gamma=Gamma,
            Delta=D * Gamma / 2.0,
            kappa=kappa,
            tau=tau,
            r_mirror=math.sqrt(1.0 - t2),
            t_mirror=math.sqrt(t2),
            eta_cav=eta_cav,
            delta_cav=delta_cav,
            auto_detuning=auto_detuning,
        )

    @property
    def C(self):
        return derived_params(self)[0]

    @property
    def D(self):
        return derived_params(self)[1]


def derived_params(c):
    """Devuelve (C, D) = (2 g**2 / (kappa Gamma), 2 Delta / Gamma)."""
    C = 2.0 * c.g * c.g / (c.kappa * c.Gamma)
    D = 2.0 * c.Delta / c.Gamma
    return _finito('C', C), _finito('D', D)


# ========== PARÁMETROS DEL LAZO ==========

@dataclass(frozen=True)
class LoopParams:
    """Divisor de entrada (r3, t3), pérdidas eta3, fase psi y amplitud alpha."""
    r3: float
    t3: float
    eta3: float = 1.0
    psi: float = 0.0
    alpha: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'alpha', complex(self.alpha))
        if not 0.0 <= self.r3 < 1.0:
            raise ParametroInvalido(f'r3 debe estar en [0, 1) (r3={self.r3}).')
        if abs(self.r3 ** 2 + self.t3 ** 2 - 1.0) > TOL_NORMALIZACION or self.t3 < 0:
            raise ParametroInvalido('El divisor del lazo no cumple r3**2 + t3**2 = 1.')
        if not 0.0 < self.eta3 <= 1.0:
            raise ParametroInvalido(f'eta3 debe estar en (0, 1] (eta3={self.eta3}).')
        _finito('psi', self.psi)

    @classmethod
    def from_reflectivity(cls, r3, eta3=1.0, psi=0.0, alpha=1.0):
        if not 0.0 <= r3 < 1.0:
            raise ParametroInvalido(f'r3 debe estar en [0, 1) (r3={r3}).')
        return cls(r3=r3, t3=math.sqrt(1.0 - r3 * r3), eta3=eta3, psi=psi, alpha=alpha)

    @property
    def P(self):
        # multiplos de pi/2 dan componentes exactas
        p = cmath.rect(1.0, self.psi)
        re = 0.0 if abs(p.real) < 1e-15 else p.real
        im = 0.0 if abs(p.imag) < 1e-15 else p.imag
        return complex(re, im)

    @property
    def sqrt_eta3(self):
        return math.sqrt(self.eta3)


# ========== CONFIGURACIÓN COMPLETA ==========

@dataclass(frozen=True)
class SystemConfig:
    cavity1: CavityQubitParams
    cavity2: CavityQubitParams
    loop: LoopParams
    backend: Backend = Backend.HIGH_FINESSE_FIRST_ORDER
    validity_threshold: float = None
    constraint_margin: float = None

    def __post_init__(self):
        object.__setattr__(self, 'backend', Backend(self.backend))
        if self.validity_threshold is None:
            object.__setattr__(self, 'validity_threshold', ajuste('VALIDITY_THRESHOLD'))
        if self.constraint_margin is None:
            object.__setattr__(self, 'constraint_margin', ajuste('CONSTRAINT_MARGIN'))
        if not 0.0 < self.validity_threshold < 1.0:
            raise ConfiguracionInvalida('validity_threshold debe estar en (0, 1).')
        if self.constraint_margin < 1.0:
            raise ConfiguracionInvalida('constraint_margin debe ser >= 1.')
        if self.backend == Backend.HIGH_FINESSE_FIRST_ORDER:
            if not (self.cavity1.auto_detuning and self.cavity2.auto_detuning):
                raise ConfiguracionInvalida(
                    'El backend de primer orden supone la desintonía automática de ambas cavidades.')
        if self.backend == Backend.NONRESONANT_LIMIT:
            if self.cavity1.D == 0 or self.cavity2.D == 0:
                raise ConfiguracionInvalida('El límite no resonante requiere D distinto de cero.')

    def cavity(self, q):
        return self.cavity1 if q == 1 else self.cavity2

    @property
    def identical_cavities(self):
        return self.cavity1 == self.cavity2

    def with_loop(self, **cambios):
        """Copia con parámetros del lazo modificados (r3 actualiza t3)."""
        if 'r3' in cambios and 't3' not in cambios:
            cambios['t3'] = math.sqrt(1.0 - cambios['r3'] ** 2)
        return replace(self, loop=replace(self.loop, **cambios))


def symmetric_config(C, D, r3, eta3=1.0, psi=0.0, alpha=1.0, kappa=None, tau=None,
                     eta_cav=1.0, backend=Backend.HIGH_FINESSE_FIRST_ORDER, **extra):
    """Atajo para dos cavidades idénticas."""
    cavidad = CavityQubitParams.from_dimensionless(C, D, kappa=kappa, tau=tau, eta_cav=eta_cav)
    return SystemConfig(
        cavity1=cavidad,
        cavity2=cavidad,
        loop=LoopParams.from_reflectivity(r3, eta3=eta3, psi=psi, alpha=alpha),
        backend=backend,
        **extra,
    )


# ========== VALIDEZ DE LA APROXIMACIÓN ==========

@dataclass(frozen=True)
class ValidityEntry:
    """Factores de la condición de débil excitación para un caso."""
    cavity: int
    partner_state: int
    photon_factor: float
    atom_factor: float
    loop_factor: float
    product: float
    passes: bool
    loop_denominator: float
    constraint_bound: float
    constraint_ok: bool


@dataclass(frozen=True)
class ValidityReport:
    threshold: float
    margin: float
    entries: tuple = field(default_factory=tuple)

    @property
    def passes(self):
        return all(e.passes for e in self.entries)

    @property
    def constraint_ok(self):
        return all(e.constraint_ok for e in self.entries)

    @property
    def max_product(self):
        return max((e.product for e in self.entries), default=0.0)


def check_weak_driving(cfg, amplitudes):
    """
    Evalúa la condición de débil excitación para cada cavidad q y cada
    estado i del átomo compañero: producto de (2|alpha|^2/Gamma_q),
    4C(1+D^2)/((1+D^2+2C)^2+C^2D^2) y t3^2/|1 - r3 P F1 F2 sqrt(eta3)|^2,
    con el átomo de la cavidad q en |1>. Solo reporta, nunca lanza.
    """
    loop = cfg.loop
    F = amplitudes.coefficients.F
    entradas = []
    for q in (1, 2):
        cav = cfg.cavity(q)
        C, D = derived_params(cav)
        foton = 2.0 * abs(loop.alpha) ** 2 / cav.Gamma
        atomo = 4.0 * C * (1.0 + D * D) / ((1.0 + D * D + 2.0 * C) ** 2 + C * C * D * D)
        for i in (0, 1):
            producto_F = F[(1, 1)] * F[(2, i)] if q == 1 else F[(1, i)] * F[(2, 1)]
            denominador = abs(1.0 - loop.r3 * loop.P * producto_F * loop.sqrt_eta3)
            lazo = loop.t3 ** 2 / denominador ** 2 if denominador > 0 else math.inf
            producto = foton * atomo * lazo
            cota = cfg.constraint_margin / C if C > 0 else 0.0
            entradas.append(ValidityEntry(
                cavity=q,
                partner_state=i,
                photon_factor=foton,
                atom_factor=atomo,
                loop_factor=lazo,
                product=producto,
                passes=producto < cfg.validity_threshold,
                loop_denominator=denominador,
                constraint_bound=cota,
                constraint_ok=denominador > cota,
            ))
    reporte = ValidityReport(cfg.validity_threshold, cfg.constraint_margin, tuple(entradas))
    if not reporte.passes:
        logger.warning(f'Condición de débil excitación violada: producto máximo {reporte.max_product:.3g}')
    return reporte
