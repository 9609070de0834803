import math
from dataclasses import replace

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from simulacion.conf import ajuste
from simulacion.core import (Backend, CavityQubitParams, LoopParams, SystemConfig,
                             check_weak_driving, derived_params, symmetric_config)
from simulacion.excepciones import ConfiguracionInvalida, ParametroInvalido
from simulacion.steady_state import solve_loop


class CavityQubitParamsTestCase(SimpleTestCase):
    def test_desde_adimensionales(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 3.0, kappa=2.0, tau=0.01)
        C, D = derived_params(cav)
        self.assertAlmostEqual(C, 10.0, places=12)
        self.assertAlmostEqual(D, 3.0, places=12)
        self.assertAlmostEqual(cav.r_mirror ** 2 + cav.t_mirror ** 2, 1.0, places=14)
        self.assertAlmostEqual(cav.kappa, cav.t_mirror ** 2 / cav.tau, places=12)

    def test_desintonia_automatica(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 3.0)
        esperado = cav.kappa * 3.0 * 10.0 / (2.0 * (1.0 + 9.0))
        self.assertAlmostEqual(cav.delta_cav, esperado, places=10)
        # replace() recalcula la desintonía
        otra = replace(cav, Delta=0.0)
        self.assertEqual(otra.delta_cav, 0.0)

    def test_desintonia_manual(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 3.0, auto_detuning=False, delta_cav=0.7)
        self.assertEqual(cav.delta_cav, 0.7)

    def test_kappa_inconsistente(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 0.0)
        with self.assertRaises(ParametroInvalido):
            replace(cav, kappa=cav.kappa * 1.001)

    def test_rangos_invalidos(self):
        casos = [
            dict(C=-1.0, D=0.0),
            dict(C=1.0, D=0.0, kappa=100.0, tau=0.01),
            dict(C=1.0, D=0.0, eta_cav=0.0),
            dict(C=1.0, D=0.0, eta_cav=1.5),
            dict(C=1.0, D=float('nan')),
        ]
        for kwargs in casos:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ParametroInvalido):
                    CavityQubitParams.from_dimensionless(**kwargs)

    def test_errores_son_de_validacion(self):
        with self.assertRaises(ValidationError):
            CavityQubitParams.from_dimensionless(-1.0, 0.0)

    def test_parametros_derivados_invariantes_de_escala(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            cav = CavityQubitParams.from_dimensionless(
                rng.uniform(0.01, 500.0), rng.uniform(-100.0, 100.0), kappa=rng.uniform(0.1, 10.0),
                tau=0.001, Gamma=rng.uniform(0.1, 10.0))
            s = float(10.0 ** rng.uniform(-3.0, 3.0))
            escalada = replace(cav, g=s * cav.g, Gamma=s * cav.Gamma, kappa=s * cav.kappa,
                               Delta=s * cav.Delta, tau=cav.tau / s)
            C, D = derived_params(cav)
            C_s, D_s = derived_params(escalada)
            with self.subTest(s=s):
                self.assertLessEqual(abs(C_s - C), 1e-12 * C)
                self.assertLessEqual(abs(D_s - D), 1e-12 * max(abs(D), 1.0))


class LoopParamsTestCase(SimpleTestCase):
    def test_fase_exacta(self):
        self.assertEqual(LoopParams.from_reflectivity(0.2, psi=math.pi).P, complex(-1.0, 0.0))
        self.assertEqual(LoopParams.from_reflectivity(0.2, psi=0.0).P, complex(1.0, 0.0))
        self.assertEqual(LoopParams.from_reflectivity(0.2, psi=math.pi / 2).P, complex(0.0, 1.0))

    def test_divisor_normalizado(self):
        loop = LoopParams.from_reflectivity(0.6)
        self.assertAlmostEqual(loop.t3, 0.8, places=14)

    def test_r3_fuera_de_rango(self):
        for r3 in (-0.1, 1.0, 1.2):
            with self.subTest(r3=r3):
                with self.assertRaises(ParametroInvalido):
                    LoopParams.from_reflectivity(r3)

    def test_eta3_fuera_de_rango(self):
        for eta3 in (0.0, 1.01):
            with self.subTest(eta3=eta3):
                with self.assertRaises(ParametroInvalido):
                    LoopParams.from_reflectivity(0.3, eta3=eta3)

    def test_alpha_complejo(self):
        self.assertIsInstance(LoopParams.from_reflectivity(0.3, alpha=2).alpha, complex)


class SystemConfigTestCase(SimpleTestCase):
    def test_valores_por_defecto(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        self.assertEqual(cfg.validity_threshold, ajuste('VALIDITY_THRESHOLD'))
        self.assertEqual(cfg.constraint_margin, ajuste('CONSTRAINT_MARGIN'))
        self.assertEqual(cfg.backend, Backend.HIGH_FINESSE_FIRST_ORDER)
        self.assertTrue(cfg.identical_cavities)

    @override_settings(PARITYSIM={'CONSTRAINT_MARGIN': 3.0})
    def test_ajustes_desde_settings(self):
        self.assertEqual(symmetric_config(10.0, 0.0, 0.3).constraint_margin, 3.0)

    def test_backend_desde_texto(self):
        cfg = symmetric_config(10.0, 10.0, 0.3, backend='nonresonant_limit')
        self.assertEqual(cfg.backend, Backend.NONRESONANT_LIMIT)

    def test_limite_no_resonante_requiere_desintonia(self):
        with self.assertRaises(ConfiguracionInvalida):
            symmetric_config(10.0, 0.0, 0.3, backend=Backend.NONRESONANT_LIMIT)

    def test_primer_orden_requiere_desintonia_automatica(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 2.0, auto_detuning=False)
        with self.assertRaises(ConfiguracionInvalida):
            SystemConfig(cav, cav, LoopParams.from_reflectivity(0.1))
        SystemConfig(cav, cav, LoopParams.from_reflectivity(0.1), backend=Backend.EXACT_MIRROR_ALGEBRA)

    def test_umbral_y_margen_invalidos(self):
        with self.assertRaises(ConfiguracionInvalida):
            symmetric_config(10.0, 0.0, 0.3, validity_threshold=1.5)
        with self.assertRaises(ConfiguracionInvalida):
            symmetric_config(10.0, 0.0, 0.3, constraint_margin=0.5)

    def test_cavidades_distintas(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        otra = replace(cfg, cavity2=CavityQubitParams.from_dimensionless(20.0, 0.0))
        self.assertFalse(otra.identical_cavities)

    def test_with_loop_actualiza_t3(self):
        cfg = symmetric_config(10.0, 0.0, 0.3).with_loop(r3=0.6)
        self.assertEqual(cfg.loop.r3, 0.6)
        self.assertAlmostEqual(cfg.loop.t3, 0.8, places=14)


class WeakDrivingTestCase(SimpleTestCase):
    def _reporte(self, **kwargs):
        cfg = symmetric_config(100.0, 100.0, 0.0, psi=math.pi, backend=Backend.NONRESONANT_LIMIT, **kwargs)
        return check_weak_driving(cfg, solve_loop(cfg))

    def test_factores(self):
        reporte = self._reporte()
        self.assertEqual(len(reporte.entries), 4)
        C = D = 100.0
        atomo = 4.0 * C * (1.0 + D * D) / ((1.0 + D * D + 2.0 * C) ** 2 + C * C * D * D)
        for e in reporte.entries:
            with self.subTest(cavidad=e.cavity, companero=e.partner_state):
                self.assertAlmostEqual(e.photon_factor, 2.0)
                self.assertAlmostEqual(e.atom_factor, atomo, places=12)
                # r3 = 0: sin realimentación
                self.assertAlmostEqual(e.loop_factor, 1.0, places=12)
                self.assertAlmostEqual(e.product, 2.0 * atomo, places=12)
        self.assertTrue(reporte.passes)
        self.assertTrue(reporte.constraint_ok)

    def test_entrada_intensa_no_cumple(self):
        with self.assertLogs('simulacion.core', level='WARNING'):
            reporte = self._reporte(alpha=10.0)
        self.assertFalse(reporte.passes)
        self.assertGreater(reporte.max_product, 0.1)

    def test_restriccion_del_lazo(self):
        cfg = symmetric_config(100.0, 100.0, 0.95, psi=math.pi, backend=Backend.NONRESONANT_LIMIT)
        reporte = check_weak_driving(cfg, solve_loop(cfg))
        # estado |11>: |1 - r3| = 0.05 < M/C = 0.1
        self.assertFalse(reporte.constraint_ok)
        for e in reporte.entries:
            self.assertAlmostEqual(e.constraint_bound, 0.1)

    def test_producto_crece_con_la_potencia_de_entrada(self):
        cfg = symmetric_config(50.0, 20.0, 0.4, psi=1.0)
        amps = solve_loop(cfg)
        anteriores = None
        with self.assertLogs('simulacion.core', level='WARNING'):
            for alpha in (0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0):
                reporte = check_weak_driving(cfg.with_loop(alpha=alpha), amps)
                productos = [e.product for e in reporte.entries]
                if anteriores is not None:
                    for antes, ahora in zip(anteriores, productos):
                        self.assertGreater(ahora, antes)
                anteriores = productos
