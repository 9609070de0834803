"""
Fotocorriente homodina integrada y discriminación de estados coherentes.

Cada incremento es dy = dW + 2 Im(exp(-i theta) beta) dt, con dW gaussiano de
media cero y varianza dt. El tiempo de medición t_m es el horizonte en que la
separación de las medias de y iguala dos desviaciones estándar.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .conf import ajuste
from .excepciones import MedicionDegenerada, ParametroInvalido

logger = logging.getLogger(__name__)

TOL_SEPARACION = 1e-12


def mean_current(beta, theta):
    """Media de dy/dt: 2 Im(exp(-i theta) beta)."""
    return 2.0 * (cmath.exp(-1j * theta) * complex(beta)).imag


@dataclass(frozen=True)
class HomodyneRun:
    beta: complex
    theta: float
    dt: float
    n_steps: int
    seed: object
    samples: np.ndarray

    def times(self):
        return self.dt * np.arange(1, self.n_steps + 1)

    def integrated(self):
        return np.cumsum(self.samples)

    @property
    def total(self):
        return float(np.sum(self.samples))


def simulate_record(beta, theta, dt, n_steps, seed):
    """Registro dy_k de n_steps pasos; determinista para una semilla dada."""
    if dt <= 0:
        raise ParametroInvalido(f'dt debe ser positivo (dt={dt}).')
    if n_steps < 1:
        raise ParametroInvalido('n_steps debe ser al menos 1.')
    rng = np.random.default_rng(seed)
    dW = rng.normal(0.0, math.sqrt(dt), size=n_steps)
    return HomodyneRun(
        beta=complex(beta),
        theta=theta,
        dt=dt,
        n_steps=n_steps,
        seed=seed,
        samples=dW + mean_current(beta, theta) * dt,
    )


def discrimination_time(beta1, beta2, theta=0.0):
    """t_m = 4 / (2 Im(e^{-i theta} beta1) - 2 Im(e^{-i theta} beta2))^2."""
    separacion = mean_current(beta1, theta) - mean_current(beta2, theta)
    escala = max(abs(beta1), abs(beta2), 1.0)
    if abs(separacion) < TOL_SEPARACION * escala:
        raise MedicionDegenerada('Los dos estados coherentes tienen la misma cuadratura medida.')
    return 4.0 / separacion ** 2


@dataclass(frozen=True)
class DiscriminationResult:
    error_rate: float
    n_traj: int
    errors: int
    t_m: float
    horizon: float
    n_steps: int
    expected_error_rate: float

    @property
    def standard_error(self):
        p = self.expected_error_rate
        return math.sqrt(p * (1.0 - p) / self.n_traj)


def discrimination_experiment(beta1, beta2, theta, n_traj, seed, horizon_factor=1.0,
                              dt_fraction=None, workers=None):
    """
    Tasa empírica de error al clasificar registros de longitud horizon_factor * t_m.

    Las trayectorias alternan beta1 (índice par) y beta2 (índice impar) y cada
    una usa su propia subsemilla derivada de (seed, índice), de modo que el
    resultado no depende de la cantidad de hilos.
    """
    if n_traj < 1:
        raise ParametroInvalido('n_traj debe ser al menos 1.')
    if horizon_factor <= 0:
        raise ParametroInvalido('horizon_factor debe ser positivo.')
    if n_traj < 1000:
        logger.warning(f'Solo {n_traj} trayectorias: la tasa de error tendrá mucho ruido')

    try:
        t_m = discrimination_time(beta1, beta2, theta)
        esperado = float(norm.cdf(-math.sqrt(horizon_factor)))
    except MedicionDegenerada:
        logger.warning('Estados indistinguibles: se usa t_m = 1 y la decisión es al azar')
        t_m = 1.0
        esperado = 0.5

    fraccion = dt_fraction or ajuste('HOMODYNE_DT_FRACTION')
    horizonte = horizon_factor * t_m
    n_steps = max(1, int(round(horizonte / (fraccion * t_m))))
    dt = horizonte / n_steps
    mu1 = mean_current(beta1, theta) * horizonte
    mu2 = mean_current(beta2, theta) * horizonte
    umbral = 0.5 * (mu1 + mu2)
    signo = 1.0 if mu1 >= mu2 else -1.0
    semillas = np.random.SeedSequence(seed).spawn(n_traj)

    def error_de(k):
        beta = beta1 if k % 2 == 0 else beta2
        y = simulate_record(beta, theta, dt, n_steps, semillas[k]).total
        dice_uno = signo * (y - umbral) > 0
        return dice_uno != (k % 2 == 0)

    hilos = workers or 1
    if hilos > 1:
        with ThreadPoolExecutor(max_workers=hilos) as pool:
            errores = sum(pool.map(error_de, range(n_traj)))
    else:
        errores = sum(error_de(k) for k in range(n_traj))

    resultado = DiscriminationResult(
        error_rate=errores / n_traj,
        n_traj=n_traj,
        errors=int(errores),
        t_m=t_m,
        horizon=horizonte,
        n_steps=n_steps,
        expected_error_rate=esperado,
    )
    logger.info(f'Discriminación homodina: {errores}/{n_traj} errores (esperado {esperado:.4f})')
    return resultado
