import math

import numpy as np
from django.test import SimpleTestCase
from scipy.stats import kstest

from simulacion.excepciones import MedicionDegenerada, ParametroInvalido
from simulacion.homodyne import (discrimination_experiment, discrimination_time, mean_current,
                                 simulate_record)


class RegistroHomodinoTestCase(SimpleTestCase):
    def test_corriente_media(self):
        self.assertAlmostEqual(mean_current(0.5j, 0.0), 1.0, places=15)
        self.assertAlmostEqual(mean_current(0.5, math.pi / 2), -1.0, places=15)

    def test_reproducible(self):
        a = simulate_record(0.3j, 0.0, 1e-3, 200, seed=11)
        b = simulate_record(0.3j, 0.0, 1e-3, 200, seed=11)
        np.testing.assert_array_equal(a.samples, b.samples)
        self.assertAlmostEqual(a.integrated()[-1], a.total, places=12)
        self.assertAlmostEqual(a.times()[-1], 0.2, places=12)

    def test_media_y_varianza(self):
        registro = simulate_record(0.25j, 0.0, 0.01, 100000, seed=3)
        incrementos = registro.samples
        self.assertAlmostEqual(np.mean(incrementos) / 0.01, 0.5, delta=0.15)
        self.assertAlmostEqual(np.var(incrementos) / 0.01, 1.0, delta=0.02)

    def test_parametros_invalidos(self):
        with self.assertRaises(ParametroInvalido):
            simulate_record(0.1j, 0.0, 0.0, 10, seed=1)
        with self.assertRaises(ParametroInvalido):
            simulate_record(0.1j, 0.0, 0.1, 0, seed=1)


class DiscriminacionTestCase(SimpleTestCase):
    def test_tiempo_de_medicion(self):
        # separación de corrientes 2: t_m = 4 / 2^2
        self.assertAlmostEqual(discrimination_time(0.5j, -0.5j), 1.0, places=15)
        with self.assertRaises(MedicionDegenerada):
            discrimination_time(0.5j, 0.5j + 0.3)

    def test_error_en_t_m(self):
        resultado = discrimination_experiment(0.4j, -0.2j, 0.0, 10000, seed=2024, dt_fraction=0.1)
        self.assertAlmostEqual(resultado.expected_error_rate, 0.158655, places=5)
        self.assertAlmostEqual(resultado.error_rate, 0.1587, delta=0.011)
        self.assertEqual(resultado.n_steps, 10)

    def test_error_en_cuatro_t_m(self):
        resultado = discrimination_experiment(0.4j, -0.2j, 0.0, 10000, seed=7, horizon_factor=4.0,
                                              dt_fraction=0.1)
        self.assertAlmostEqual(resultado.expected_error_rate, 0.02275, places=5)
        self.assertAlmostEqual(resultado.error_rate, 0.02275, delta=0.005)
        self.assertAlmostEqual(resultado.horizon, 4.0 * resultado.t_m, places=12)

    def test_independiente_de_los_hilos(self):
        uno = discrimination_experiment(0.4j, -0.2j, 0.0, 2000, seed=5, dt_fraction=0.1, workers=1)
        cuatro = discrimination_experiment(0.4j, -0.2j, 0.0, 2000, seed=5, dt_fraction=0.1, workers=4)
        self.assertEqual(uno.errors, cuatro.errors)

    def test_estados_indistinguibles(self):
        with self.assertLogs('simulacion.homodyne', level='WARNING'):
            resultado = discrimination_experiment(0.3j, 0.3j, 0.0, 2000, seed=1, dt_fraction=0.1)
        self.assertEqual(resultado.t_m, 1.0)
        self.assertEqual(resultado.expected_error_rate, 0.5)

    def test_pocas_trayectorias(self):
        with self.assertLogs('simulacion.homodyne', level='WARNING'):
            discrimination_experiment(0.4j, -0.2j, 0.0, 10, seed=1, dt_fraction=0.1)
        with self.assertRaises(ParametroInvalido):
            discrimination_experiment(0.4j, -0.2j, 0.0, 0, seed=1)


class EstadisticaDelRegistroTestCase(SimpleTestCase):
    def test_covarianza_de_fase(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            b1, b2 = rng.normal(size=2) + 1j * rng.normal(size=2)
            theta, phi = rng.uniform(0.0, 2 * math.pi, size=2)
            rotacion = complex(np.exp(1j * phi))
            with self.subTest(theta=theta, phi=phi):
                self.assertAlmostEqual(mean_current(b1 * rotacion, theta + phi), mean_current(b1, theta), places=12)
                directo = discrimination_time(b1, b2, theta)
                rotado = discrimination_time(b1 * rotacion, b2 * rotacion, theta + phi)
                self.assertLessEqual(abs(rotado - directo), 1e-9 * directo)

    def test_registro_rotado(self):
        a = simulate_record(0.3 + 0.2j, 0.4, 1e-3, 500, seed=13)
        b = simulate_record((0.3 + 0.2j) * complex(np.exp(0.9j)), 1.3, 1e-3, 500, seed=13)
        np.testing.assert_allclose(a.samples, b.samples, rtol=0, atol=1e-14)

    def test_semillas_distintas_no_se_correlacionan(self):
        n = 100000
        a = simulate_record(0.0, 0.0, 1e-2, n, seed=1).samples
        b = simulate_record(0.0, 0.0, 1e-2, n, seed=2).samples
        self.assertFalse(np.array_equal(a, b))
        self.assertLess(abs(np.corrcoef(a, b)[0, 1]), 5.0 / math.sqrt(n))

    def test_misma_semilla_con_distintos_hilos(self):
        resultados = [discrimination_experiment(0.4j, -0.2j, 0.0, 3000, seed=99, dt_fraction=0.05, workers=w)
                      for w in (1, 2, 8)]
        for otro in resultados[1:]:
            self.assertEqual(otro, resultados[0])
        hijos = np.random.SeedSequence(99).spawn(4)
        uno = simulate_record(0.4j, 0.0, 0.05, 20, hijos[3])
        otra = simulate_record(0.4j, 0.0, 0.05, 20, np.random.SeedSequence(99).spawn(4)[3])
        np.testing.assert_array_equal(uno.samples, otra.samples)

    def test_sin_senal_es_ruido_de_wiener(self):
        # y(T) ~ N(0, T) con T = 1
        semillas = np.random.SeedSequence(2718).spawn(2000)
        totales = np.array([simulate_record(0.0, 0.0, 0.01, 100, s).total for s in semillas])
        n = len(totales)
        self.assertLess(abs(np.mean(totales)), 5.0 * math.sqrt(1.0 / n))
        self.assertLess(abs(np.var(totales, ddof=1) - 1.0), 5.0 * math.sqrt(2.0 / (n - 1)))
        self.assertGreater(kstest(totales, 'norm').pvalue, 1e-4)

    def test_media_y_varianza_dentro_de_cinco_sigmas(self):
        n, dt = 100000, 0.01
        for beta, theta, semilla in ((0.25j, 0.0, 5), (0.5, math.pi / 2, 6), (-0.1 + 0.3j, 0.7, 7)):
            registro = simulate_record(beta, theta, dt, n, seed=semilla)
            with self.subTest(beta=beta, theta=theta):
                media = np.mean(registro.samples) / dt
                self.assertLess(abs(media - mean_current(beta, theta)), 5.0 / math.sqrt(n * dt))
                varianza = np.var(registro.samples, ddof=1) / dt
                self.assertLess(abs(varianza - 1.0), 5.0 * math.sqrt(2.0 / (n - 1)))
