"""
Presupuesto de decoherencia de la medición de paridad.

A partir de las amplitudes condicionales se calculan:

- los tiempos de medición t_m^00, t_m^11 y t_m = max(t_m^00, t_m^11)
- las tasas de emisión espontánea de cada átomo en ambos subespacios
- las tasas de pérdida en el lazo (eta3) y dentro de cada cavidad (eta_q)
- la pureza final de un estado del subespacio protegido

También se incluyen las expresiones cerradas de los casos no resonante
(D = C, P = -1) y resonante (D = 0, P = +1), que sirven de camino rápido para
los barridos y se contrastan contra el cálculo genérico en las pruebas.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .core import ESTADOS_IMPARES, ESTADOS_PARES, derived_params
from .excepciones import MedicionDegenerada, ParametroInvalido, Singularidad
from .steady_state import emission_prefactor

logger = logging.getLogger(__name__)

SUBESPACIOS = ('odd', 'even')
TOL_CUADRATURA = 1e-9
TOL_DEGENERADA = 1e-12
TOL_POLO = 1e-12


def _pares(subspace):
    if subspace == 'odd':
        return ESTADOS_IMPARES
    if subspace == 'even':
        return ESTADOS_PARES
    raise ParametroInvalido(f'Subespacio desconocido: {subspace}')


# ========== TIPOS ==========

@dataclass(frozen=True)
class MeasurementTime:
    t_m00: float
    t_m11: float
    t_m: float
    avisos: tuple = ()
    even_imbalance: float = 0.0


@dataclass(frozen=True)
class DecoherenceReport:
    """
    Tiempo de medición y tasas de decoherencia de ambos subespacios.

    Las tasas están en unidades de Gamma_1. Los campos *_loss_norm guardan el
    producto de pérdida en el lazo dividido por (1 - eta3), bien definido
    también para eta3 = 1.

    t_m00 es None en la forma cerrada resonante, que solo expresa el tiempo
    limitante t_m^11.
    """
    t_m: float
    t_m00: Optional[float]
    t_m11: float
    nu_odd_se_1: float
    nu_odd_se_2: float
    nu_even_se_1: float
    nu_even_se_2: float
    nu_odd_loss: float
    nu_even_loss: float
    nu_cav_loss_odd: tuple = (0.0, 0.0)
    nu_cav_loss_even: tuple = (0.0, 0.0)
    odd_loss_norm: float = 0.0
    even_loss_norm: float = 0.0
    loop_importance: float = 0.0
    cavity_importance: tuple = (0.0, 0.0)
    avisos: tuple = field(default_factory=tuple)
    even_imbalance: float = 0.0

    @property
    def odd_se_products(self):
        return (self.nu_odd_se_1 * self.t_m, self.nu_odd_se_2 * self.t_m)

    @property
    def even_se_products(self):
        return (self.nu_even_se_1 * self.t_m, self.nu_even_se_2 * self.t_m)

    def exponent(self, subspace='odd'):
        """Exponente total sum(nu) t_m que reduce la coherencia del subespacio."""
        if subspace == 'odd':
            tasas = (self.nu_odd_se_1, self.nu_odd_se_2, self.nu_odd_loss) + tuple(self.nu_cav_loss_odd)
        elif subspace == 'even':
            tasas = (self.nu_even_se_1, self.nu_even_se_2, self.nu_even_loss) + tuple(self.nu_cav_loss_even)
        else:
            raise ParametroInvalido(f'Subespacio desconocido: {subspace}')
        return sum(tasas) * self.t_m


@dataclass(frozen=True)
class OddSubspaceState:
    """Estado a|10> + b|01> del subespacio impar."""
    a: complex
    b: complex

    subspace = 'odd'

    def __post_init__(self):
        norma = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norma - 1.0) > 1e-12:
            raise ParametroInvalido(f'El estado no está normalizado (|a|^2 + |b|^2 = {norma}).')

    @property
    def c1100(self):
        return abs(self.a) ** 2

    @property
    def c0011(self):
        return abs(self.b) ** 2

    @property
    def c1001(self):
        return self.a * complex(self.b).conjugate()


class EvenSubspaceState(OddSubspaceState):
    """Estado a|11> + b|00> del subespacio par."""
    subspace = 'even'


# ========== CÁLCULO GENÉRICO ==========

def measurement_time(amps):
    """t_m^ii = |Im(beta10) - Im(beta^ii)|^-2 y t_m = max(t_m^00, t_m^11)."""
    escala = max(abs(amps.alpha), 1.0)
    b10 = amps.beta((1, 0)).imag
    b01 = amps.beta((0, 1)).imag
    b00 = amps.beta((0, 0)).imag
    b11 = amps.beta((1, 1)).imag
    avisos = []
    if abs(amps.alpha.imag) > TOL_DEGENERADA * escala:
        avisos.append('alpha_no_real')
    if abs(b10 - b01) > TOL_CUADRATURA * escala:
        avisos.append('asimetria_impar')
        logger.warning(f'Im(beta10) y Im(beta01) difieren en {abs(b10 - b01):.3e}')

    d00 = abs(b10 - b00)
    d11 = abs(b10 - b11)
    if d00 < TOL_DEGENERADA * escala and d11 < TOL_DEGENERADA * escala:
        raise MedicionDegenerada('Los subespacios par e impar no se distinguen en la cuadratura medida.')
    t00 = d00 ** -2 if d00 >= TOL_DEGENERADA * escala else math.inf
    t11 = d11 ** -2 if d11 >= TOL_DEGENERADA * escala else math.inf

    desbalance = abs(b00 - b11) ** 2
    if abs(b00 - b11) > TOL_CUADRATURA * escala:
        avisos.append('desbalance_par')
        logger.debug(f'Im(beta00) distinto de Im(beta11): |diferencia|^2 = {desbalance:.3e}')
    return MeasurementTime(t00, t11, max(t00, t11), tuple(avisos), desbalance)


def se_rates(amps, cfg, subspace):
    """Tasas de emisión espontánea (nu_1, nu_2) con el átomo de cada cavidad en |1>."""
    if subspace == 'odd':
        estados = ((1, 0), (0, 1))
    elif subspace == 'even':
        estados = ((1, 1), (1, 1))
    else:
        raise ParametroInvalido(f'Subespacio desconocido: {subspace}')
    backend = amps.coefficients.backend
    tasas = []
    for q, estado in zip((1, 2), estados):
        cav = cfg.cavity(q)
        tasas.append(emission_prefactor(cav, backend) * abs(amps[estado].xi(q)) ** 2 * cav.tau)
    return tuple(tasas)


def loop_distinguishability(amps, subspace):
    """|zeta3^a - zeta3^b|^2 entre los dos estados del subespacio."""
    a, b = _pares(subspace)
    return abs(amps[a].zeta3 - amps[b].zeta3) ** 2


def loss_rates(amps, cfg, subspace):
    """(nu_lazo, nu_cavidad_1, nu_cavidad_2) por pérdidas de fotones."""
    a, b = _pares(subspace)
    lazo = (1.0 - cfg.loop.eta3) * loop_distinguishability(amps, subspace)
    cavidades = tuple(
        (1.0 - cfg.cavity(q).eta_cav) * abs(amps[a].xi(q) - amps[b].xi(q)) ** 2
        for q in (1, 2)
    )
    return (lazo,) + cavidades


def decoherence_report(amps, cfg):
    """Reporte completo de ambos subespacios a partir de amplitudes resueltas."""
    tiempos = measurement_time(amps)
    t_m = tiempos.t_m
    impar_se = se_rates(amps, cfg, 'odd')
    par_se = se_rates(amps, cfg, 'even')
    impar_perd = loss_rates(amps, cfg, 'odd')
    par_perd = loss_rates(amps, cfg, 'even')
    C1, _ = derived_params(cfg.cavity1)
    C2, _ = derived_params(cfg.cavity2)
    return DecoherenceReport(
        t_m=t_m,
        t_m00=tiempos.t_m00,
        t_m11=tiempos.t_m11,
        nu_odd_se_1=impar_se[0],
        nu_odd_se_2=impar_se[1],
        nu_even_se_1=par_se[0],
        nu_even_se_2=par_se[1],
        nu_odd_loss=impar_perd[0],
        nu_even_loss=par_perd[0],
        nu_cav_loss_odd=impar_perd[1:],
        nu_cav_loss_even=par_perd[1:],
        odd_loss_norm=loop_distinguishability(amps, 'odd') * t_m,
        even_loss_norm=loop_distinguishability(amps, 'even') * t_m,
        loop_importance=C1 * (1.0 - cfg.loop.eta3),
        cavity_importance=(C1 * (1.0 - cfg.cavity1.eta_cav), C2 * (1.0 - cfg.cavity2.eta_cav)),
        avisos=tiempos.avisos,
        even_imbalance=tiempos.even_imbalance,
    )


# ========== FORMAS CERRADAS ==========

def _verificar_r3(r3, eta3):
    if not 0.0 <= r3 < 1.0:
        raise ParametroInvalido(f'r3 debe estar en [0, 1) (r3={r3}).')
    if not 0.0 < eta3 <= 1.0:
        raise ParametroInvalido(f'eta3 debe estar en (0, 1] (eta3={eta3}).')


def closed_form_nonresonant(C, D, r3, eta3, alpha2):
    """
    Expresiones cerradas con F = (D + iC)/(D - iC) y P = -1.

    x = Re(F^2), s = sqrt(eta3). Todas las tasas se devuelven como
    producto / t_m para poder armar un DecoherenceReport común.
    """
    _verificar_r3(r3, eta3)
    if D == 0 or C <= 0:
        raise ParametroInvalido('El caso no resonante requiere C > 0 y D distinto de cero.')
    avisos = []
    if abs(D) < 10.0 or C < 10.0:
        avisos.append('fuera_de_regimen_no_resonante')
        logger.warning(f'C={C}, D={D}: la aproximación no resonante puede no ser válida')

    F = complex(D, C) / complex(D, -C)
    x = (F * F).real
    im2 = F.imag ** 2
    s = math.sqrt(eta3)
    r = r3
    constructiva = 1.0 + 2.0 * s * r * x + eta3 * r * r
    if constructiva < TOL_POLO or 1.0 - s * r < TOL_POLO:
        raise Singularidad(f'Polo de interferencia constructiva en r3={r3}', estado=(1, 1))
    if 1.0 - x < TOL_POLO:
        raise MedicionDegenerada('Re(F^2) = 1: los subespacios no se distinguen.')

    comun = eta3 * (1.0 - x) ** 2 * (1.0 - r * r) * (1.0 - s * r) ** 2
    t_m_inv = (eta3 * (1.0 - r * r) ** 2 * (1.0 - s * r) ** 2 * (1.0 - x) ** 2 * alpha2
               / ((1.0 + s * r) ** 2 * constructiva ** 2))
    if t_m_inv <= 0:
        raise MedicionDegenerada('Sin entrada (alpha = 0) no hay medición.')
    t_m = 1.0 / t_m_inv

    impar_se = 8.0 * C * constructiva ** 2 / ((C * C + D * D) * comun)
    par_se = 8.0 * C * (1.0 + s * r) ** 2 * constructiva / ((C * C + D * D) * comun)
    impar_norm = 4.0 * im2 * constructiva ** 2 / comun
    par_norm = 4.0 * im2 * (1.0 + s * r) ** 2 / (eta3 * (1.0 - x) ** 2 * (1.0 - r * r))
    return DecoherenceReport(
        t_m=t_m,
        t_m00=t_m,
        t_m11=t_m,
        nu_odd_se_1=impar_se / t_m,
        nu_odd_se_2=eta3 * impar_se / t_m,
        nu_even_se_1=par_se / t_m,
        nu_even_se_2=eta3 * par_se / t_m,
        nu_odd_loss=(1.0 - eta3) * impar_norm / t_m,
        nu_even_loss=(1.0 - eta3) * par_norm / t_m,
        odd_loss_norm=impar_norm,
        even_loss_norm=par_norm,
        loop_importance=C * (1.0 - eta3),
        avisos=tuple(avisos),
    )


def resonance_factor(C):
    """G = (1 - 2C)/(1 + 2C), reflexión de la cavidad resonante con el átomo en |1>."""
    return (1.0 - 2.0 * C) / (1.0 + 2.0 * C)


def closed_form_resonant(C, r3, eta3, alpha2):
    """Expresiones cerradas con D = 0 y P = +1; t_m es t_m^11 y t_m00 queda en None."""
    _verificar_r3(r3, eta3)
    if C <= 0:
        raise ParametroInvalido(f'El caso resonante requiere C > 0 (C={C}).')
    G = resonance_factor(C)
    G2 = G * G
    s = math.sqrt(eta3)
    r = r3
    if 1.0 - s * r * G < TOL_POLO or 1.0 - s * r * G2 < TOL_POLO or 1.0 - s * r < TOL_POLO:
        raise Singularidad(f'Polo de interferencia constructiva en r3={r3}', estado=(1, 1))
    if G2 * (G - 1.0) ** 2 < TOL_DEGENERADA:
        raise MedicionDegenerada(f'Con C={C} los subespacios no se distinguen (G={G}).')

    t_m_inv = (eta3 * G2 * (G - 1.0) ** 2 * (1.0 - r * r) ** 2 * alpha2
               / ((1.0 - s * r * G) ** 2 * (1.0 - s * r * G2) ** 2))
    if t_m_inv <= 0:
        raise MedicionDegenerada('Sin entrada (alpha = 0) no hay medición.')
    t_m = 1.0 / t_m_inv

    base = (1.0 + 2.0 * C) ** 2 * eta3 * G2 * (G - 1.0) ** 2 * (1.0 - r * r)
    impar_se = 8.0 * C * (1.0 - s * r * G2) ** 2 / base
    par_se = 8.0 * C * (1.0 - s * r * G) ** 2 / base
    impar_norm = (1.0 - s * r * G2) ** 2 / (eta3 * G2 * (1.0 - r * r))
    par_norm = (1.0 - eta3 * r * r * G2) ** 2 / (eta3 * G2 * (1.0 - r * r) * (1.0 - s * r) ** 2)
    return DecoherenceReport(
        t_m=t_m,
        t_m00=None,
        t_m11=t_m,
        nu_odd_se_1=impar_se / t_m,
        nu_odd_se_2=eta3 * impar_se / t_m,
        nu_even_se_1=par_se / t_m,
        nu_even_se_2=eta3 * G2 * par_se / t_m,
        nu_odd_loss=(1.0 - eta3) * impar_norm / t_m,
        nu_even_loss=(1.0 - eta3) * par_norm / t_m,
        odd_loss_norm=impar_norm,
        even_loss_norm=par_norm,
        loop_importance=C * (1.0 - eta3),
    )


@dataclass(frozen=True)
class CaseComparison:
    resonant: DecoherenceReport
    nonresonant: DecoherenceReport

    @property
    def se_ratio(self):
        """Cociente resonante / no resonante del producto nu_odd_se_1 t_m."""
        return self.resonant.odd_se_products[0] / self.nonresonant.odd_se_products[0]

    @property
    def t_m_ratio(self):
        return self.resonant.t_m / self.nonresonant.t_m


def compare_cases(C, r3, eta3, alpha2):
    """Compara el caso resonante con el no resonante D = C a igual C y r3."""
    return CaseComparison(
        resonant=closed_form_resonant(C, r3, eta3, alpha2),
        nonresonant=closed_form_nonresonant(C, C, r3, eta3, alpha2),
    )


# ========== PUREZA ==========

def purity_bound(state, report):
    """
    Pureza final c1100^2 + c0011^2 + 2|c1001|^2 exp(-sum(nu) t_m).

    Para el subespacio par con Im(beta00) distinto de Im(beta11) el valor no
    incluye la corrección por pesos acumulados; se devuelve igual con aviso.
    """
    if state.subspace == 'even' and 'desbalance_par' in report.avisos:
        logger.warning('Pureza del subespacio par sin corrección por desbalance de Im(beta)')
    exponente = report.exponent(state.subspace)
    return state.c1100 ** 2 + state.c0011 ** 2 + 2.0 * abs(state.c1001) ** 2 * math.exp(-exponente)
