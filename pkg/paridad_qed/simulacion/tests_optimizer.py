import math

import numpy as np
from django.test import SimpleTestCase

from simulacion.core import Backend, symmetric_config
from simulacion.decoherence import closed_form_nonresonant, closed_form_resonant
from simulacion.excepciones import ParametroInvalido, RestriccionVacia
from simulacion.optimizer import (COLUMNAS, SweepSpec, feasible_r3_limit, minimize_r3_numeric,
                                  odd_exponent, r3_opt_nonresonant, r3_opt_resonant, run_sweep)


class ClosedOptimumTestCase(SimpleTestCase):
    def test_resonante(self):
        self.assertAlmostEqual(r3_opt_resonant(10.0), 361.0 / 441.0, places=12)
        self.assertAlmostEqual(r3_opt_resonant(10.0), 0.818594, places=6)
        self.assertAlmostEqual(r3_opt_resonant(10.0, eta3=0.81), 0.9 * 361.0 / 441.0, places=12)

    def test_no_resonante(self):
        self.assertAlmostEqual(r3_opt_nonresonant(-0.8), 0.26795, places=5)

    def test_no_resonante_sin_lazo(self):
        for x in (-0.5, -0.2, 0.0, 0.7, 1.0):
            with self.subTest(x=x):
                self.assertEqual(r3_opt_nonresonant(x), 0.0)

    def test_no_resonante_en_el_borde(self):
        r = r3_opt_nonresonant(-1.0)
        self.assertLess(r, 1.0)
        self.assertAlmostEqual(r, 1.0, places=12)

    def test_desde_d_sobre_c(self):
        # Re(F^2) = -0.8 para D/C = 1.38742
        doc = 1.38742
        F = complex(doc, 1.0) / complex(doc, -1.0)
        self.assertAlmostEqual((F * F).real, -0.8, places=5)
        self.assertAlmostEqual(r3_opt_nonresonant((F * F).real), 0.26795, places=4)

    def test_minimo_de_la_forma_cerrada(self):
        C, D = 100.0, 100.0 * 1.38742
        r_opt = r3_opt_nonresonant(-0.8)
        centro = closed_form_nonresonant(C, D, r_opt, 1.0, 1.0).odd_se_products[0]
        for dr in (-0.02, 0.02):
            with self.subTest(dr=dr):
                vecino = closed_form_nonresonant(C, D, r_opt + dr, 1.0, 1.0).odd_se_products[0]
                self.assertGreater(vecino, centro)

    def test_minimo_resonante(self):
        r_opt = r3_opt_resonant(10.0)
        centro = closed_form_resonant(10.0, r_opt, 1.0, 1.0).odd_se_products[0]
        for dr in (-0.01, 0.01):
            vecino = closed_form_resonant(10.0, r_opt + dr, 1.0, 1.0).odd_se_products[0]
            self.assertGreater(vecino, centro)

    def test_eficiencia_menor_que_uno(self):
        with self.assertLogs('simulacion.optimizer', level='WARNING'):
            r = r3_opt_nonresonant(-0.8, eta3=0.9)
        self.assertGreaterEqual(r, 0.0)
        self.assertLess(r, 1.0)

    def test_fuera_de_rango(self):
        with self.assertRaises(ParametroInvalido):
            r3_opt_nonresonant(-1.5)
        with self.assertRaises(ParametroInvalido):
            r3_opt_resonant(0.0)


class NumericOptimumTestCase(SimpleTestCase):
    def test_restriccion_activa(self):
        cfg = symmetric_config(100.0, 100.0, 0.0, psi=math.pi, backend=Backend.NONRESONANT_LIMIT)
        self.assertAlmostEqual(feasible_r3_limit(cfg, 10.0), 0.9, places=12)
        resultado = minimize_r3_numeric(cfg, constraint_margin=10.0)
        self.assertAlmostEqual(resultado.r_max, 0.9, places=12)
        self.assertAlmostEqual(resultado.r3, 0.9, places=5)
        self.assertTrue(resultado.constraint_active)

    def test_resonante_coincide_con_la_forma_cerrada(self):
        cfg = symmetric_config(10.0, 0.0, 0.0, psi=0.0)
        resultado = minimize_r3_numeric(cfg, constraint_margin=1.0)
        self.assertTrue(resultado.unimodal)
        self.assertFalse(resultado.constraint_active)
        self.assertAlmostEqual(resultado.r3, r3_opt_resonant(10.0), places=4)
        self.assertAlmostEqual(resultado.value, odd_exponent(cfg.with_loop(r3=resultado.r3)), places=12)

    def test_restriccion_vacia(self):
        cfg = symmetric_config(5.0, 0.0, 0.0)
        with self.assertRaises(RestriccionVacia):
            feasible_r3_limit(cfg, 10.0)

    def test_objetivo_propio(self):
        cfg = symmetric_config(10.0, 0.0, 0.0)

        def parabola(c):
            return (c.loop.r3 - 0.3) ** 2

        resultado = minimize_r3_numeric(cfg, objective=parabola, constraint_margin=1.0)
        self.assertAlmostEqual(resultado.r3, 0.3, places=6)


class NonresonantNumericOptimumTestCase(SimpleTestCase):
    C = 100.0
    # D/C con Re(F^2) = -0.8 exacto
    DOC = 1.0 / math.tan(math.acos(-0.8) / 4.0)

    def _config(self, signo=1.0):
        return symmetric_config(self.C, signo * self.DOC * self.C, 0.0, psi=math.pi,
                                backend=Backend.NONRESONANT_LIMIT)

    def test_coincide_con_la_forma_cerrada(self):
        F = complex(self.DOC, 1.0) / complex(self.DOC, -1.0)
        self.assertAlmostEqual((F * F).real, -0.8, places=12)
        resultado = minimize_r3_numeric(self._config())
        self.assertFalse(resultado.constraint_active)
        self.assertAlmostEqual(resultado.r3, 0.26795, delta=1e-5)
        self.assertAlmostEqual(resultado.r3, r3_opt_nonresonant(-0.8), delta=1e-5)

    def test_invariante_al_cambiar_el_signo_de_d(self):
        positivo = minimize_r3_numeric(self._config(1.0))
        negativo = minimize_r3_numeric(self._config(-1.0))
        self.assertAlmostEqual(positivo.r3, negativo.r3, delta=1e-6)
        self.assertAlmostEqual(positivo.value, negativo.value, places=9)
        for doc in (0.3, 1.0, 1.38742, 4.0):
            F = complex(doc, 1.0) / complex(doc, -1.0)
            F_neg = complex(-doc, 1.0) / complex(-doc, -1.0)
            with self.subTest(doc=doc):
                self.assertAlmostEqual(r3_opt_nonresonant((F * F).real), r3_opt_nonresonant((F_neg * F_neg).real),
                                       places=12)


class SweepTestCase(SimpleTestCase):
    def test_barrido_no_resonante(self):
        spec = SweepSpec('r3', 0.0, 0.95, 96, case='nonresonant', fixed={'doc': 1.0})
        filas = run_sweep(spec, workers=1)
        self.assertEqual(len(filas), 96)
        np.testing.assert_allclose([f.value for f in filas], np.linspace(0.0, 0.95, 96))
        self.assertAlmostEqual(filas[0].nu_odd_se_tm_C, 1.0, places=9)
        for fila in filas:
            esperado = (1.0 - fila.value) / (1.0 + fila.value)
            self.assertAlmostEqual(fila.nu_odd_se_tm_C, esperado, places=9)
            self.assertAlmostEqual(fila.nu_odd_loss_tm, esperado, places=9)
            if fila.value > 0:
                self.assertGreater(fila.nu_even_se_tm_C, fila.nu_odd_se_tm_C)
                self.assertGreater(fila.nu_even_loss_tm, fila.nu_odd_loss_tm)

    def test_hilos_no_cambian_el_resultado(self):
        spec = SweepSpec('r3', 0.0, 0.9, 40, case='resonant', fixed={'C': 10.0})
        self.assertEqual(run_sweep(spec, workers=1), run_sweep(spec, workers=4))

    def test_polo_marcado(self):
        spec = SweepSpec('r3', 0.0, 0.999999999999, 3, case='nonresonant', fixed={'doc': 1.0})
        filas = run_sweep(spec, workers=1)
        self.assertEqual(filas[-1].flags, ('polo',))
        self.assertIsNone(filas[-1].nu_odd_se_tm_C)

    def test_barrido_de_c(self):
        spec = SweepSpec('C', 10.0, 1000.0, 5, case='resonant')
        filas = run_sweep(spec, workers=1)
        for fila in filas:
            self.assertEqual(fila.flags, ())
            self.assertIsNotNone(fila.nu_even_loss_tm)

    def test_especificaciones_invalidas(self):
        casos = [
            dict(variable='g', lo=0.0, hi=1.0, steps=5),
            dict(variable='r3', lo=0.5, hi=0.1, steps=5),
            dict(variable='r3', lo=0.0, hi=1.0, steps=5),
            dict(variable='r3', lo=0.0, hi=0.5, steps=1),
            dict(variable='doc', lo=0.5, hi=1.5, steps=5, case='resonant'),
            dict(variable='r3', lo=0.0, hi=0.5, steps=5, case='lineal'),
            dict(variable='r3', lo=0.0, hi=0.5, steps=5, columns=('otra',)),
        ]
        for kwargs in casos:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ParametroInvalido):
                    SweepSpec(**kwargs)

    def test_columnas(self):
        self.assertEqual(COLUMNAS, ('nu_odd_se_tm_C', 'nu_even_se_tm_C', 'nu_odd_loss_tm', 'nu_even_loss_tm'))
