import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from simulacion.core import ESTADOS, Backend, CavityQubitParams, LoopParams, SystemConfig, symmetric_config
from simulacion.excepciones import ConfiguracionInvalida, ParametroInvalido
from simulacion.steady_state import solve_loop
from simulacion.transient import (path_params, propagate_closed_loop, propagate_naive_network,
                                  recursion_step)


def _config(**kwargs):
    # espejos de baja fineza para que el transitorio se apague en pocas vueltas
    datos = dict(C=5.0, D=2.0, r3=0.3, eta3=0.9, psi=0.4, kappa=20.0, tau=0.01,
                 backend=Backend.EXACT_MIRROR_ALGEBRA)
    datos.update(kwargs)
    return symmetric_config(datos.pop('C'), datos.pop('D'), datos.pop('r3'), **datos)


class ClosedLoopTestCase(SimpleTestCase):
    def test_converge_al_estacionario(self):
        cfg = _config()
        traza = propagate_closed_loop(cfg, 1.0, 1500)
        amps = solve_loop(cfg)
        for estado in ESTADOS:
            with self.subTest(estado=estado):
                self.assertAlmostEqual(traza.beta[estado][-1], amps.beta(estado), places=9)
                self.assertAlmostEqual(traza.zeta2[estado][-1], amps[estado].zeta2, places=9)

    def test_coincide_con_la_suma_directa(self):
        cfg = _config()
        traza = propagate_closed_loop(cfg, 1.0, 25)
        for estado in ESTADOS:
            params = path_params(cfg, estado)
            for n in (0, 1, 2, 7, 24):
                with self.subTest(estado=estado, n=n):
                    directo = recursion_step(traza.zeta2[estado], n, params)
                    self.assertAlmostEqual(traza.zeta5[estado][n], directo, places=12)

    def test_coincide_con_el_propagador_por_saltos(self):
        cfg = _config()
        rng = np.random.default_rng(7)
        alpha = rng.normal(size=80) + 1j * rng.normal(size=80)
        rapido = propagate_closed_loop(cfg, alpha, 80)
        ingenuo = propagate_naive_network(cfg, alpha, 80)
        for estado in ESTADOS:
            with self.subTest(estado=estado):
                np.testing.assert_allclose(rapido.beta[estado], ingenuo.beta[estado], rtol=0, atol=1e-12)

    def test_simetria_impar_exacta(self):
        traza = propagate_closed_loop(_config(), 1.0, 50)
        np.testing.assert_array_equal(traza.beta[(1, 0)], traza.beta[(0, 1)])

    def test_conjugacion_con_factores_impuestos(self):
        # f0 = conj(f1) y P = -1: invertir ambos átomos da -conj(beta) en cada paso
        cfg = _config(psi=math.pi, eta3=1.0)
        f1 = 0.97 * complex(math.cos(0.3), math.sin(0.3))
        f = {(q, 1): f1 for q in (1, 2)}
        f.update({(q, 0): f1.conjugate() for q in (1, 2)})
        traza = propagate_closed_loop(cfg, 1.0, 60, f=f)
        np.testing.assert_allclose(traza.beta[(0, 0)], -np.conj(traza.beta[(1, 1)]), atol=1e-12)

    def test_pulso_se_apaga(self):
        cfg = _config()
        alpha = np.zeros(800, dtype=complex)
        alpha[:20] = 1.0
        traza = propagate_closed_loop(cfg, alpha, 800)
        for estado in ESTADOS:
            self.assertLess(abs(traza.beta[estado][-1]), 1e-8)

    def test_tiempos(self):
        traza = propagate_closed_loop(_config(), 1.0, 5)
        np.testing.assert_allclose(traza.times(), [0.0, 0.01, 0.02, 0.03, 0.04])
        self.assertEqual(traza.n_steps, 5)


class ValidacionTransitorioTestCase(SimpleTestCase):
    def test_tau_distintos(self):
        cfg = _config()
        otra = CavityQubitParams.from_dimensionless(5.0, 2.0, kappa=10.0, tau=0.02)
        with self.assertRaises(ConfiguracionInvalida):
            propagate_closed_loop(replace(cfg, cavity2=otra), 1.0, 10)

    def test_entrada_de_largo_incorrecto(self):
        with self.assertRaises(ParametroInvalido):
            propagate_closed_loop(_config(), np.ones(9), 10)
        with self.assertRaises(ParametroInvalido):
            propagate_naive_network(_config(), 1.0, 0)

    def test_historia_corta(self):
        params = path_params(_config(), (1, 1))
        with self.assertRaises(ParametroInvalido):
            recursion_step(np.zeros(3), 5, params)


def _config_al_azar(rng, simetrica=False):
    # tau comun; kappa tau >= 0.002 deja r |f| <= 0.999
    cav1 = CavityQubitParams.from_dimensionless(
        rng.uniform(0.1, 100.0), rng.uniform(-50.0, 50.0), kappa=rng.uniform(0.2, 50.0), tau=0.01,
        eta_cav=rng.uniform(0.8, 1.0))
    cav2 = cav1 if simetrica else CavityQubitParams.from_dimensionless(
        rng.uniform(0.1, 100.0), rng.uniform(-50.0, 50.0), kappa=rng.uniform(0.2, 50.0), tau=0.01,
        eta_cav=rng.uniform(0.8, 1.0))
    lazo = LoopParams.from_reflectivity(rng.uniform(0.0, 0.95), eta3=rng.uniform(0.5, 1.0),
                                        psi=rng.uniform(0.0, 2 * math.pi))
    return SystemConfig(cav1, cav2, lazo, backend=Backend.EXACT_MIRROR_ALGEBRA)


def _entrada_al_azar(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


class OraculoTransitorioTestCase(SimpleTestCase):
    def test_propagadores_coinciden_con_parametros_al_azar(self):
        rng = np.random.default_rng(23)
        for k in range(50):
            cfg = _config_al_azar(rng)
            for estado in ESTADOS:
                p = path_params(cfg, estado)
                self.assertLessEqual(max(abs(p.r1 * p.f1), abs(p.r2 * p.f2)), 0.999)
            alpha = _entrada_al_azar(rng, 200)
            rapido = propagate_closed_loop(cfg, alpha, 200)
            ingenuo = propagate_naive_network(cfg, alpha, 200)
            for estado in ESTADOS:
                with self.subTest(sorteo=k, estado=estado):
                    np.testing.assert_allclose(rapido.beta[estado], ingenuo.beta[estado], rtol=1e-10, atol=1e-10)

    def test_simetria_impar_en_500_pasos(self):
        rng = np.random.default_rng(29)
        for k in range(100):
            cfg = _config_al_azar(rng, simetrica=True)
            traza = propagate_closed_loop(cfg, _entrada_al_azar(rng, 500), 500)
            with self.subTest(sorteo=k):
                np.testing.assert_allclose(traza.beta[(1, 0)], traza.beta[(0, 1)], rtol=1e-12, atol=1e-12)

    def test_causalidad(self):
        rng = np.random.default_rng(37)
        cfg = _config_al_azar(rng)
        alpha = _entrada_al_azar(rng, 120)
        for propagar in (propagate_closed_loop, propagate_naive_network):
            base = propagar(cfg, alpha, 120)
            for n in (0, 10, 59, 118):
                perturbada = alpha.copy()
                perturbada[n + 1:] += _entrada_al_azar(rng, 120 - n - 1)
                traza = propagar(cfg, perturbada, 120)
                for estado in ESTADOS:
                    with self.subTest(propagador=propagar.__name__, n=n, estado=estado):
                        np.testing.assert_array_equal(traza.beta[estado][:n + 1], base.beta[estado][:n + 1])
                        np.testing.assert_array_equal(traza.zeta2[estado][:n + 1], base.zeta2[estado][:n + 1])

    def test_escalon_sin_lazo_llega_al_estacionario(self):
        cfg = _config(r3=0.0)
        alpha = np.zeros(400, dtype=complex)
        alpha[10:] = 1.0
        traza = propagate_closed_loop(cfg, alpha, 400)
        amps = solve_loop(cfg)
        for estado in ESTADOS:
            with self.subTest(estado=estado):
                np.testing.assert_array_equal(traza.beta[estado][:10], np.zeros(10))
                self.assertAlmostEqual(traza.beta[estado][-1], amps.beta(estado), places=9)


class FactoresYRetardoTestCase(SimpleTestCase):
    def test_primer_orden_converge_al_exacto(self):
        cfg = _config(backend=Backend.HIGH_FINESSE_FIRST_ORDER)
        traza = propagate_closed_loop(cfg, 1.0, 1500)
        exacto = solve_loop(replace(cfg, backend=Backend.EXACT_MIRROR_ALGEBRA))
        primer_orden = solve_loop(cfg)
        for estado in ESTADOS:
            with self.subTest(estado=estado):
                self.assertAlmostEqual(traza.beta[estado][-1], exacto.beta(estado), places=9)
        self.assertGreater(max(abs(traza.beta[e][-1] - primer_orden.beta(e)) for e in ESTADOS), 1e-6)

    def test_retardo_desplaza_los_tiempos(self):
        cfg = _config()
        sin_retardo = propagate_closed_loop(cfg, 1.0, 5)
        for propagar in (propagate_closed_loop, propagate_naive_network):
            traza = propagar(cfg, 1.0, 5, delay_offset=3)
            with self.subTest(propagador=propagar.__name__):
                np.testing.assert_allclose(traza.times(), [0.03, 0.04, 0.05, 0.06, 0.07])
                self.assertEqual(traza.delay_offset, 3)
                np.testing.assert_allclose(traza.beta[(1, 1)], sin_retardo.beta[(1, 1)], rtol=0, atol=1e-12)
        self.assertEqual(sin_retardo.delay_offset, 0)

    def test_retardo_invalido(self):
        for retardo in (-1, 1.5, True):
            with self.subTest(retardo=retardo):
                with self.assertRaises(ParametroInvalido):
                    propagate_closed_loop(_config(), 1.0, 5, delay_offset=retardo)
