"""
Dinámica transitoria del lazo en una grilla de un paso por vuelta (tau).

Dos propagadores independientes:

- propagate_closed_loop: usa la suma de caminos para zeta5 en función de la
  historia de zeta2, evaluada con recurrencias tipo Horner (costo lineal)
- propagate_naive_network: salta literalmente las muestras de campo por cada
  acoplador de cavidad, sin usar la suma de caminos

Ambos cierran el lazo de forma instantánea en la grilla:
zeta2(n) = P (t3 alpha(n) + i r3 zeta5(n)), resolviendo el término de cero
vueltas de forma algebraica.

Los factores de vuelta f_q son siempre los exactos de round_trip_factor, sea
cual sea el backend de la configuración: con first_order o nonresonant_limit
la traza converge al beta del álgebra exacta de espejos, no al de solve_loop
con ese backend. Para imponer otros factores se pasa f explícitamente.

El retardo del lazo T solo etiqueta la grilla: delay_offset (en vueltas)
desplaza los tiempos de times() sin cambiar las amplitudes.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ESTADOS
from .excepciones import ConfiguracionInvalida, ParametroInvalido
from .steady_state import round_trip_factor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathParams:
    """Constantes de espejo y factores de vuelta de un estado (i1, i2)."""
    r1: float
    t1: float
    f1: complex
    r2: float
    t2: float
    f2: complex
    sqrt_eta3: float


@dataclass
class TransientTrace:
    tau: float
    alpha: np.ndarray
    zeta2: dict = field(default_factory=dict)
    zeta5: dict = field(default_factory=dict)
    beta: dict = field(default_factory=dict)
    delay_offset: int = 0

    @property
    def n_steps(self):
        return len(self.alpha)

    def times(self):
        """Tiempos (delay_offset + n) tau de cada muestra."""
        return self.tau * (self.delay_offset + np.arange(self.n_steps))


def _verificar_tau(cfg):
    if not math.isclose(cfg.cavity1.tau, cfg.cavity2.tau, rel_tol=1e-12):
        raise ConfiguracionInvalida(
            f'Los transitorios requieren tau1 = tau2 (tau1={cfg.cavity1.tau}, tau2={cfg.cavity2.tau}).')


def path_params(cfg, estado, f=None):
    """Parámetros de camino para un estado; f permite imponer factores de vuelta."""
    i1, i2 = estado
    c1, c2 = cfg.cavity1, cfg.cavity2
    f1 = f[(1, i1)] if f is not None else round_trip_factor(c1, i1)
    f2 = f[(2, i2)] if f is not None else round_trip_factor(c2, i2)
    return PathParams(
        r1=c1.r_mirror, t1=c1.t_mirror, f1=f1,
        r2=c2.r_mirror, t2=c2.t_mirror, f2=f2,
        sqrt_eta3=cfg.loop.sqrt_eta3,
    )


def _verificar_retardo(delay_offset):
    if isinstance(delay_offset, bool) or int(delay_offset) != delay_offset or delay_offset < 0:
        raise ParametroInvalido(f'delay_offset debe ser un entero >= 0 (delay_offset={delay_offset}).')
    return int(delay_offset)


def _entrada(alpha, n_steps):
    if n_steps < 1:
        raise ParametroInvalido('n_steps debe ser al menos 1.')
    if np.isscalar(alpha):
        return np.full(n_steps, complex(alpha), dtype=complex)
    serie = np.asarray(alpha, dtype=complex)
    if serie.shape != (n_steps,):
        raise ParametroInvalido(f'La entrada alpha debe tener {n_steps} muestras (tiene {serie.size}).')
    return serie


def recursion_step(history, n, params):
    """
    zeta5(T + n tau) por suma directa de caminos sobre zeta2(0..n).

    Incluye los caminos por una sola cavidad, la doble suma de caminos por
    ambas cavidades y el término de cero vueltas -i r1 r2 sqrt(eta3) zeta2(n).
    Costo cuadrático; se usa como referencia de la versión recursiva.
    """
    p = params
    if len(history) < n + 1:
        raise ParametroInvalido(f'La historia de zeta2 no cubre el índice {n}.')
    s = p.sqrt_eta3
    a1 = p.r1 * p.f1
    a2 = p.r2 * p.f2
    total = -1j * p.r1 * p.r2 * s * history[n]
    for q in range(n):
        total += 1j * p.t1 ** 2 * p.r2 * p.f1 * s * a1 ** (n - q - 1) * history[q]
        total += 1j * p.t2 ** 2 * p.r1 * p.f2 * s * a2 ** (n - q - 1) * history[q]
    for q in range(n - 1):
        doble = sum(a1 ** k * a2 ** (n - q - k - 2) for k in range(n - q - 1))
        total -= 1j * p.t1 ** 2 * p.t2 ** 2 * p.f1 * p.f2 * s * doble * history[q]
    return total


def _propagar_estado_recursivo(p, loop, alpha):
    s = p.sqrt_eta3
    a1 = p.r1 * p.f1
    a2 = p.r2 * p.f2
    c_uno = 1j * s * p.t1 ** 2 * p.r2 * p.f1
    c_dos = 1j * s * p.t2 ** 2 * p.r1 * p.f2
    c_doble = 1j * s * p.t1 ** 2 * p.t2 ** 2 * (p.f1 * p.f2)
    r1r2s = p.r1 * p.r2 * s
    P = loop.P
    denominador = 1.0 - P * loop.r3 * r1r2s

    n_steps = len(alpha)
    zeta2 = np.zeros(n_steps, dtype=complex)
    zeta5 = np.zeros(n_steps, dtype=complex)
    # A, B: caminos por una cavidad; M, Mp: doble suma en ambos órdenes
    A = B = M = Mp = 0j
    for n in range(n_steps):
        historia = (c_uno * A + c_dos * B) - c_doble * ((M + Mp) / 2.0)
        z2 = P * (loop.t3 * alpha[n] + 1j * loop.r3 * historia) / denominador
        zeta2[n] = z2
        zeta5[n] = -1j * r1r2s * z2 + historia
        M, Mp = a2 * M + A, a1 * Mp + B
        A, B = a1 * A + z2, a2 * B + z2
    return zeta2, zeta5


def propagate_closed_loop(cfg, alpha, n_steps, f=None, delay_offset=0):
    """
    Traza transitoria con la recursión de caminos y cierre causal del lazo.

    Usa los factores exactos de round_trip_factor salvo que se pase f.
    """
    _verificar_tau(cfg)
    delay_offset = _verificar_retardo(delay_offset)
    entrada = _entrada(alpha, n_steps)
    loop = cfg.loop
    traza = TransientTrace(tau=cfg.cavity1.tau, alpha=entrada, delay_offset=delay_offset)
    for estado in ESTADOS:
        zeta2, zeta5 = _propagar_estado_recursivo(path_params(cfg, estado, f), loop, entrada)
        traza.zeta2[estado] = zeta2
        traza.zeta5[estado] = zeta5
        traza.beta[estado] = loop.t3 * zeta5 + 1j * loop.r3 * entrada
    logger.info(f'Transitorio recursivo de {n_steps} pasos calculado')
    return traza


def _propagar_estado_ingenuo(p, loop, alpha):
    s = p.sqrt_eta3
    P = loop.P

    def salida(r, t, f, anterior, entrada):
        return -r * entrada + t * f * anterior

    def zeta5_de(z2, cav1, cav2):
        z3 = -1j * salida(p.r1, p.t1, p.f1, cav1, z2)
        z4 = 1j * s * z3
        return -1j * salida(p.r2, p.t2, p.f2, cav2, z4), z4

    n_steps = len(alpha)
    zeta2 = np.zeros(n_steps, dtype=complex)
    zeta5 = np.zeros(n_steps, dtype=complex)
    cav1 = cav2 = 0j
    for n in range(n_steps):
        # zeta5 es afín en zeta2: se obtiene con dos sondas
        h, _ = zeta5_de(0j, cav1, cav2)
        g = zeta5_de(1 + 0j, cav1, cav2)[0] - h
        z2 = P * (loop.t3 * alpha[n] + 1j * loop.r3 * h) / (1.0 - 1j * P * loop.r3 * g)
        z5, z4 = zeta5_de(z2, cav1, cav2)
        zeta2[n] = z2
        zeta5[n] = z5
        cav1 = p.t1 * z2 + p.r1 * p.f1 * cav1
        cav2 = p.t2 * z4 + p.r2 * p.f2 * cav2
    return zeta2, zeta5


def propagate_naive_network(cfg, alpha, n_steps, f=None, delay_offset=0):
    """Misma interfaz que propagate_closed_loop, con saltos explícitos de campo."""
    _verificar_tau(cfg)
    delay_offset = _verificar_retardo(delay_offset)
    entrada = _entrada(alpha, n_steps)
    loop = cfg.loop
    traza = TransientTrace(tau=cfg.cavity1.tau, alpha=entrada, delay_offset=delay_offset)
    for estado in ESTADOS:
        zeta2, zeta5 = _propagar_estado_ingenuo(path_params(cfg, estado, f), loop, entrada)
        traza.zeta2[estado] = zeta2
        traza.zeta5[estado] = zeta5
        traza.beta[estado] = loop.t3 * zeta5 + 1j * loop.r3 * entrada
    logger.info(f'Transitorio por saltos de {n_steps} pasos calculado')
    return traza
