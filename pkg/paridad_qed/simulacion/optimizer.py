"""
Optimización de la reflectividad del lazo r3 y barridos de parámetros.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .conf import ajuste
from .core import derived_params
from .decoherence import (closed_form_nonresonant, closed_form_resonant,
                          decoherence_report, resonance_factor)
from .excepciones import (ErrorNumerico, MedicionDegenerada, ParametroInvalido,
                          RestriccionVacia, Singularidad)
from .steady_state import reflection_coefficients, solve_loop

logger = logging.getLogger(__name__)

R3_MAXIMO = 1.0 - 1e-9
XATOL = 1e-8

VARIABLES = ('r3', 'doc', 'C', 'eta3')
CASOS = ('resonant', 'nonresonant')
COLUMNAS = ('nu_odd_se_tm_C', 'nu_even_se_tm_C', 'nu_odd_loss_tm', 'nu_even_loss_tm')


# ========== ÓPTIMOS CERRADOS ==========

def _exponente_no_resonante(r, x, eta3):
    s = math.sqrt(eta3)
    return (1.0 + 2.0 * s * r * x + eta3 * r * r) ** 2 / ((1.0 - r * r) * (1.0 - s * r) ** 2)


def r3_opt_nonresonant(re_f2, eta3=1.0):
    """
    r3 óptimo del caso no resonante en función de Re(F^2).

    Con eta3 = 1 usa (sqrt(3 - 3x^2) - 2 - x)/(1 + 2x), válida para
    x en [-1, -1/2]; fuera de ese intervalo el óptimo es 0. Con eta3 < 1
    minimiza numéricamente el exponente impar y lo avisa en el log.
    """
    x = float(re_f2)
    if not -1.0 <= x <= 1.0:
        raise ParametroInvalido(f'Re(F^2) debe estar en [-1, 1] (recibido {x}).')
    if not 0.0 < eta3 <= 1.0:
        raise ParametroInvalido(f'eta3 debe estar en (0, 1] (eta3={eta3}).')

    if eta3 < 1.0:
        logger.warning(f'eta3={eta3} < 1: r3 óptimo no resonante obtenido numéricamente')
        res = minimize_scalar(_exponente_no_resonante, bounds=(0.0, R3_MAXIMO), args=(x, eta3),
                              method='bounded', options={'xatol': XATOL})
        r = float(res.x)
        return 0.0 if _exponente_no_resonante(0.0, x, eta3) <= res.fun else r

    if x >= -0.5:
        return 0.0
    r = (math.sqrt(3.0 - 3.0 * x * x) - 2.0 - x) / (1.0 + 2.0 * x)
    return float(np.clip(r, 0.0, np.nextafter(1.0, 0.0)))


def r3_opt_resonant(C, eta3=1.0):
    if C <= 0:
        raise ParametroInvalido(f'El caso resonante requiere C > 0 (C={C}).')
    return math.sqrt(eta3) * resonance_factor(C) ** 2


# ========== MINIMIZACIÓN NUMÉRICA ==========

@dataclass(frozen=True)
class R3Result:
    r3: float
    value: float
    constraint_active: bool
    r_max: float
    unimodal: bool = True


def odd_exponent(cfg):
    """Exponente impar total (SE de ambos átomos y pérdidas) por el cálculo genérico."""
    return decoherence_report(solve_loop(cfg), cfg).exponent('odd')


def feasible_r3_limit(cfg, margin):
    """
    Mayor r3 que cumple |1 - r3 P F1 F2 sqrt(eta3)| >= margin / C_q para
    cada cavidad con su átomo en |1>. Devuelve 1.0 si no hay cota.
    """
    coef = reflection_coefficients(cfg)
    loop = cfg.loop
    limite = 1.0
    casos = ((1, (1, 0)), (1, (1, 1)), (2, (0, 1)), (2, (1, 1)))
    for q, (i1, i2) in casos:
        C, _ = derived_params(cfg.cavity(q))
        if C == 0:
            continue
        b = margin / C
        if b >= 1.0:
            raise RestriccionVacia(
                f'Ningún r3 cumple la restricción en la cavidad {q}: margen/C = {b:.3g} >= 1.')
        w = loop.P * coef.F[(1, i1)] * coef.F[(2, i2)] * loop.sqrt_eta3
        a = abs(w) ** 2
        if a == 0:
            continue
        discriminante = w.real ** 2 - a * (1.0 - b * b)
        if discriminante < 0:
            continue
        raiz = (w.real - math.sqrt(discriminante)) / a
        if raiz > 0:
            limite = min(limite, raiz)
    return limite


def _es_unimodal(valores):
    finitos = np.asarray(valores, dtype=float)
    if not np.all(np.isfinite(finitos)):
        return False
    d = np.sign(np.diff(finitos))
    d = d[d != 0]
    # como máximo un cambio de bajada a subida
    cambios = np.count_nonzero((d[:-1] < 0) & (d[1:] > 0))
    subidas_previas = np.count_nonzero((d[:-1] > 0) & (d[1:] < 0))
    return cambios <= 1 and subidas_previas == 0


def minimize_r3_numeric(cfg, objective=None, constraint_margin=None):
    """
    Minimiza el objetivo en r3 sobre [0, r_max].

    r_max sale de la restricción de débil excitación con margen M/C. La
    unimodalidad se verifica en una grilla gruesa; si falla se hace una
    búsqueda en grilla de paso 1e-3.
    """
    objetivo = objective or odd_exponent
    margen = cfg.constraint_margin if constraint_margin is None else constraint_margin
    r_max = feasible_r3_limit(cfg, margen)
    tope = min(r_max, R3_MAXIMO)

    def f(r):
        try:
            return objetivo(cfg.with_loop(r3=float(r)))
        except (ErrorNumerico, MedicionDegenerada):
            return math.inf

    grilla = np.linspace(0.0, tope, 41)
    unimodal = _es_unimodal([f(r) for r in grilla])
    if unimodal:
        res = minimize_scalar(f, bounds=(0.0, tope), method='bounded', options={'xatol': XATOL})
        candidatos = [(float(res.x), float(res.fun))]
    else:
        logger.warning('Objetivo no unimodal en r3: búsqueda en grilla de paso 1e-3')
        fina = np.arange(0.0, tope, 1e-3)
        candidatos = [(float(r), f(r)) for r in fina]
    candidatos += [(0.0, f(0.0)), (tope, f(tope))]
    r_opt, valor = min(candidatos, key=lambda par: par[1])

    activa = r_max < 1.0 and r_opt >= tope - 1e-6
    if activa:
        logger.info(f'Óptimo recortado por la restricción en r3={tope:.6f}')
    return R3Result(r3=r_opt, value=valor, constraint_active=activa, r_max=r_max, unimodal=unimodal)


# ========== BARRIDOS ==========

@dataclass(frozen=True)
class SweepSpec:
    """
    Barrido de una variable con las demás fijas.

    fixed admite C, doc (D/C), r3, eta3 y alpha2.
    """
    variable: str
    lo: float
    hi: float
    steps: int
    case: str = 'nonresonant'
    fixed: dict = field(default_factory=dict)
    columns: tuple = COLUMNAS

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ParametroInvalido(f'Variable de barrido desconocida: {self.variable}')
        if self.case not in CASOS:
            raise ParametroInvalido(f'Caso desconocido: {self.case}')
        if self.variable == 'doc' and self.case == 'resonant':
            raise ParametroInvalido('El caso resonante tiene D = 0; no se puede barrer D/C.')
        if not self.lo < self.hi:
            raise ParametroInvalido(f'Rango inválido: [{self.lo}, {self.hi}]')
        if self.steps < 2:
            raise ParametroInvalido('El barrido necesita al menos 2 puntos.')
        if self.variable == 'r3' and not (0.0 <= self.lo and self.hi < 1.0):
            raise ParametroInvalido('El rango de r3 debe estar contenido en [0, 1).')
        desconocidas = set(self.columns) - set(COLUMNAS)
        if desconocidas:
            raise ParametroInvalido(f'Columnas desconocidas: {sorted(desconocidas)}')

    def grid(self):
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepRow:
    value: float
    nu_odd_se_tm_C: float = None
    nu_even_se_tm_C: float = None
    nu_odd_loss_tm: float = None
    nu_even_loss_tm: float = None
    flags: tuple = ()


def _fila(spec, valor):
    p = {'C': 100.0, 'doc': 1.0, 'r3': 0.0, 'eta3': 1.0, 'alpha2': 1.0}
    p.update(spec.fixed)
    p[spec.variable] = float(valor)
    try:
        if spec.case == 'resonant':
            rep = closed_form_resonant(p['C'], p['r3'], p['eta3'], p['alpha2'])
        else:
            rep = closed_form_nonresonant(p['C'], p['doc'] * p['C'], p['r3'], p['eta3'], p['alpha2'])
    except Singularidad:
        return SweepRow(value=float(valor), flags=('polo',))
    except MedicionDegenerada:
        return SweepRow(value=float(valor), flags=('degenerada',))
    return SweepRow(
        value=float(valor),
        nu_odd_se_tm_C=rep.odd_se_products[0] * p['C'],
        nu_even_se_tm_C=rep.even_se_products[0] * p['C'],
        nu_odd_loss_tm=rep.odd_loss_norm,
        nu_even_loss_tm=rep.even_loss_norm,
        flags=rep.avisos,
    )


def run_sweep(spec, workers=None):
    """Una fila por punto de la grilla, en el orden de la grilla."""
    hilos = workers or ajuste('THREADS')
    grilla = spec.grid()
    if hilos > 1:
        with ThreadPoolExecutor(max_workers=hilos) as pool:
            filas = list(pool.map(lambda v: _fila(spec, v), grilla))
    else:
        filas = [_fila(spec, v) for v in grilla]
    logger.info(f'Barrido de {spec.variable} con {len(filas)} filas ({spec.case})')
    return filas
