import math
from dataclasses import replace
from types import SimpleNamespace
from typing import Optional, get_type_hints

import numpy as np
from django.test import SimpleTestCase

from simulacion.core import Backend, CavityQubitParams, symmetric_config
from simulacion.decoherence import (DecoherenceReport, EvenSubspaceState, OddSubspaceState,
                                    closed_form_nonresonant, closed_form_resonant, compare_cases,
                                    decoherence_report, loss_rates, measurement_time, purity_bound,
                                    resonance_factor, se_rates)
from simulacion.excepciones import MedicionDegenerada, ParametroInvalido, Singularidad
from simulacion.homodyne import discrimination_time
from simulacion.optimizer import r3_opt_nonresonant, r3_opt_resonant
from simulacion.steady_state import solve_loop

CAMPOS = ('t_m', 'nu_odd_se_1', 'nu_odd_se_2', 'nu_even_se_1', 'nu_even_se_2',
          'nu_odd_loss', 'nu_even_loss', 'odd_loss_norm', 'even_loss_norm')


class RelativoMixin:
    def assertRelativo(self, a, b, tol=1e-9):
        escala = max(abs(a), abs(b))
        if escala == 0:
            return
        self.assertLessEqual(abs(a - b) / escala, tol, f'{a} != {b}')

    def assertReportesIguales(self, generico, cerrado, tol=1e-9):
        for campo in CAMPOS:
            with self.subTest(campo=campo):
                self.assertRelativo(getattr(generico, campo), getattr(cerrado, campo), tol)


class ClosedFormOracleTestCase(RelativoMixin, SimpleTestCase):
    def test_no_resonante_contra_el_calculo_generico(self):
        casos = [(10.0, 10.0, 0.3, 0.95), (50.0, 40.0, 0.6, 0.8), (100.0, 120.0, 0.1, 1.0),
                 (30.0, -30.0, 0.5, 0.9), (200.0, 180.0, 0.85, 0.97)]
        for C, D, r3, eta3 in casos:
            with self.subTest(C=C, D=D, r3=r3, eta3=eta3):
                cfg = symmetric_config(C, D, r3, eta3=eta3, psi=math.pi, backend=Backend.NONRESONANT_LIMIT)
                generico = decoherence_report(solve_loop(cfg), cfg)
                self.assertReportesIguales(generico, closed_form_nonresonant(C, D, r3, eta3, 1.0))
                self.assertRelativo(generico.t_m00, generico.t_m11)

    def test_resonante_contra_el_calculo_generico(self):
        casos = [(10.0, 0.3, 0.9), (25.0, 0.7, 1.0), (5.0, 0.5, 0.8), (100.0, 0.9, 0.99), (10.0, 0.0, 1.0)]
        for C, r3, eta3 in casos:
            with self.subTest(C=C, r3=r3, eta3=eta3):
                cfg = symmetric_config(C, 0.0, r3, eta3=eta3, psi=0.0)
                generico = decoherence_report(solve_loop(cfg), cfg)
                cerrado = closed_form_resonant(C, r3, eta3, 1.0)
                self.assertReportesIguales(generico, cerrado)
                self.assertRelativo(generico.t_m11, cerrado.t_m)
                self.assertGreater(generico.t_m11, generico.t_m00)

    def test_no_resonante_con_parametros_al_azar(self):
        rng = np.random.default_rng(101)
        for k in range(100):
            C = rng.uniform(10.0, 200.0)
            D = rng.choice((-1.0, 1.0)) * rng.uniform(1.0, 2.0) * C
            r3, eta3, alpha = rng.uniform(0.0, 0.9), rng.uniform(0.8, 1.0), rng.uniform(0.2, 2.0)
            cfg = symmetric_config(C, D, r3, eta3=eta3, psi=math.pi, alpha=alpha,
                                   backend=Backend.NONRESONANT_LIMIT)
            generico = decoherence_report(solve_loop(cfg), cfg)
            with self.subTest(sorteo=k, C=C, D=D, r3=r3, eta3=eta3):
                self.assertReportesIguales(generico, closed_form_nonresonant(C, D, r3, eta3, alpha ** 2), 1e-10)

    def test_resonante_con_parametros_al_azar(self):
        rng = np.random.default_rng(103)
        for k in range(100):
            C = rng.uniform(1.0, 100.0)
            r3, eta3, alpha = rng.uniform(0.0, 0.9), rng.uniform(0.8, 1.0), rng.uniform(0.2, 2.0)
            cfg = symmetric_config(C, 0.0, r3, eta3=eta3, psi=0.0, alpha=alpha)
            generico = decoherence_report(solve_loop(cfg), cfg)
            with self.subTest(sorteo=k, C=C, r3=r3, eta3=eta3):
                self.assertReportesIguales(generico, closed_form_resonant(C, r3, eta3, alpha ** 2), 1e-10)

    def test_amplitud_de_entrada(self):
        uno = closed_form_resonant(10.0, 0.3, 1.0, 1.0)
        cuatro = closed_form_resonant(10.0, 0.3, 1.0, 4.0)
        self.assertRelativo(uno.t_m, 4.0 * cuatro.t_m)
        self.assertRelativo(uno.odd_se_products[0], cuatro.odd_se_products[0])


class ClosedFormValuesTestCase(RelativoMixin, SimpleTestCase):
    def test_factor_resonante(self):
        self.assertAlmostEqual(resonance_factor(10.0), -19.0 / 21.0, places=15)

    def test_tiempo_resonante_sin_lazo(self):
        G = -19.0 / 21.0
        reporte = closed_form_resonant(10.0, 0.0, 1.0, 1.0)
        self.assertAlmostEqual(1.0 / reporte.t_m, 2.96996, places=5)
        self.assertRelativo(1.0 / reporte.t_m, G * G * (G - 1.0) ** 2)
        self.assertIsNone(reporte.t_m00)

    def test_emision_resonante_sin_lazo(self):
        reporte = closed_form_resonant(10.0, 0.0, 1.0, 1.0)
        self.assertAlmostEqual(reporte.odd_se_products[0] * 10.0, 0.6108, places=4)

    def test_curvas_con_d_igual_a_c(self):
        for r3 in (0.0, 0.2, 0.5, 0.8, 0.95):
            with self.subTest(r3=r3):
                reporte = closed_form_nonresonant(100.0, 100.0, r3, 1.0, 1.0)
                esperado = (1.0 - r3) / (1.0 + r3)
                self.assertRelativo(reporte.odd_se_products[0] * 100.0, esperado)
                self.assertRelativo(reporte.odd_loss_norm, esperado)
                if r3 > 0:
                    self.assertGreater(reporte.even_se_products[0], reporte.odd_se_products[0])
                    self.assertGreater(reporte.even_loss_norm, reporte.odd_loss_norm)

    def test_perdida_normalizada_sin_lazo(self):
        reporte = closed_form_nonresonant(100.0, 100.0, 0.0, 1.0 - 1e-9, 1.0)
        self.assertAlmostEqual(reporte.odd_loss_norm, 1.0, places=6)
        self.assertAlmostEqual(reporte.nu_odd_loss * reporte.t_m / 1e-9, 1.0, places=5)

    def test_sin_perdidas_no_hay_tasa_de_perdida(self):
        reporte = closed_form_nonresonant(100.0, 100.0, 0.4, 1.0, 1.0)
        self.assertEqual(reporte.nu_odd_loss, 0.0)
        self.assertEqual(reporte.nu_even_loss, 0.0)

    def test_importancia_relativa(self):
        reporte = closed_form_nonresonant(100.0, 100.0, 0.4, 0.99, 1.0)
        self.assertAlmostEqual(reporte.loop_importance, 1.0, places=12)

    def test_segundo_atomo(self):
        G = resonance_factor(20.0)
        reporte = closed_form_resonant(20.0, 0.4, 0.81, 1.0)
        self.assertRelativo(reporte.nu_odd_se_2, 0.81 * reporte.nu_odd_se_1)
        self.assertRelativo(reporte.nu_even_se_2, 0.81 * G * G * reporte.nu_even_se_1)

    def test_fuera_de_regimen(self):
        with self.assertLogs('simulacion.decoherence', level='WARNING'):
            reporte = closed_form_nonresonant(5.0, 5.0, 0.3, 1.0, 1.0)
        self.assertIn('fuera_de_regimen_no_resonante', reporte.avisos)

    def test_polo(self):
        with self.assertRaises(Singularidad):
            closed_form_nonresonant(100.0, 100.0, 1.0 - 1e-13, 1.0, 1.0)

    def test_parametros_invalidos(self):
        with self.assertRaises(ParametroInvalido):
            closed_form_resonant(0.0, 0.3, 1.0, 1.0)
        with self.assertRaises(ParametroInvalido):
            closed_form_nonresonant(100.0, 0.0, 0.3, 1.0, 1.0)
        with self.assertRaises(ParametroInvalido):
            closed_form_resonant(10.0, 1.0, 1.0, 1.0)

    def test_sin_entrada(self):
        with self.assertRaises(MedicionDegenerada):
            closed_form_resonant(10.0, 0.3, 1.0, 0.0)


class TiempoDeMedicionTestCase(RelativoMixin, SimpleTestCase):
    def test_coincide_con_la_discriminacion_homodina(self):
        configs = [
            symmetric_config(10.0, 0.0, 0.3),
            symmetric_config(10.0, 3.0, 0.4, eta3=0.9, psi=1.1, alpha=0.7),
            symmetric_config(100.0, 100.0, 0.5, psi=math.pi, backend=Backend.NONRESONANT_LIMIT),
        ]
        for cfg in configs:
            amps = solve_loop(cfg)
            tiempos = measurement_time(amps)
            with self.subTest(cfg=cfg):
                self.assertRelativo(tiempos.t_m00, discrimination_time(amps.beta((1, 0)), amps.beta((0, 0)), 0.0), 1e-12)
                self.assertRelativo(tiempos.t_m11, discrimination_time(amps.beta((1, 0)), amps.beta((1, 1)), 0.0), 1e-12)

    def test_el_lazo_optimo_no_empeora_la_emision(self):
        casos = [
            (closed_form_resonant(10.0, r3_opt_resonant(10.0), 1.0, 1.0), closed_form_resonant(10.0, 0.0, 1.0, 1.0)),
            (closed_form_resonant(40.0, r3_opt_resonant(40.0, 0.9), 0.9, 1.0),
             closed_form_resonant(40.0, 0.0, 0.9, 1.0)),
            (closed_form_nonresonant(100.0, 138.742, r3_opt_nonresonant(-0.8), 1.0, 1.0),
             closed_form_nonresonant(100.0, 138.742, 0.0, 1.0, 1.0)),
        ]
        for optimo, sin_lazo in casos:
            with self.subTest(optimo=optimo.t_m):
                self.assertLessEqual(optimo.odd_se_products[0], sin_lazo.odd_se_products[0])

    def test_el_lazo_optimo_en_el_calculo_generico(self):
        def producto(r3):
            cfg = symmetric_config(10.0, 0.0, r3)
            return decoherence_report(solve_loop(cfg), cfg).odd_se_products[0]

        self.assertLess(producto(r3_opt_resonant(10.0)), producto(0.0))

    def test_t_m00_opcional(self):
        self.assertEqual(get_type_hints(DecoherenceReport)['t_m00'], Optional[float])


class CompareCasesTestCase(SimpleTestCase):
    def test_factor_dos_en_la_emision(self):
        comparacion = compare_cases(1e3, 0.0, 1.0, 1.0)
        G = resonance_factor(1e3)
        self.assertAlmostEqual(comparacion.se_ratio * G * G, 0.5, places=9)
        self.assertAlmostEqual(comparacion.t_m_ratio, 1.0, delta=0.01)


class GenericPipelineTestCase(SimpleTestCase):
    def test_medicion_degenerada(self):
        cfg = symmetric_config(0.0, 0.0, 0.0)
        with self.assertRaises(MedicionDegenerada):
            measurement_time(solve_loop(cfg))

    def test_cavidades_distintas(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        cfg = replace(cfg, cavity2=CavityQubitParams.from_dimensionless(20.0, 0.0))
        with self.assertLogs('simulacion.decoherence', level='WARNING'):
            tiempos = measurement_time(solve_loop(cfg))
        self.assertIn('asimetria_impar', tiempos.avisos)

    def test_alpha_complejo(self):
        cfg = symmetric_config(10.0, 0.0, 0.3, alpha=complex(1.0, 0.5))
        tiempos = measurement_time(solve_loop(cfg))
        self.assertIn('alpha_no_real', tiempos.avisos)

    def test_desbalance_par(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        tiempos = measurement_time(solve_loop(cfg))
        self.assertIn('desbalance_par', tiempos.avisos)
        self.assertGreater(tiempos.even_imbalance, 0.0)

    def test_sin_perdidas(self):
        cfg = symmetric_config(10.0, 3.0, 0.3)
        amps = solve_loop(cfg)
        for subespacio in ('odd', 'even'):
            with self.subTest(subespacio=subespacio):
                self.assertEqual(loss_rates(amps, cfg, subespacio), (0.0, 0.0, 0.0))

    def test_perdidas_en_cavidad(self):
        cfg = symmetric_config(10.0, 3.0, 0.3, eta_cav=0.9)
        amps = solve_loop(cfg)
        _, cav1, cav2 = loss_rates(amps, cfg, 'odd')
        esperado = 0.1 * abs(amps[(1, 0)].xi1 - amps[(0, 1)].xi1) ** 2
        self.assertAlmostEqual(cav1, esperado, places=12)
        self.assertGreater(cav2, 0.0)

    def test_emision_impar_con_cavidades_iguales(self):
        cfg = symmetric_config(10.0, 0.0, 0.3, eta3=0.81)
        nu1, nu2 = se_rates(solve_loop(cfg), cfg, 'odd')
        self.assertAlmostEqual(nu2 / nu1, 0.81, places=12)

    def test_subespacio_desconocido(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        amps = solve_loop(cfg)
        with self.assertRaises(ParametroInvalido):
            se_rates(amps, cfg, 'mixto')
        with self.assertRaises(ParametroInvalido):
            decoherence_report(amps, cfg).exponent('mixto')


class PurityTestCase(SimpleTestCase):
    def test_pureza_impar(self):
        reporte = closed_form_nonresonant(100.0, 100.0, 0.5, 0.99, 1.0)
        estado = OddSubspaceState(1 / math.sqrt(2), 1 / math.sqrt(2))
        esperado = 0.5 + 0.5 * math.exp(-reporte.exponent('odd'))
        self.assertAlmostEqual(purity_bound(estado, reporte), esperado, places=12)
        self.assertLess(purity_bound(estado, reporte), 1.0)

    def test_estado_de_base_no_pierde_pureza(self):
        reporte = closed_form_resonant(10.0, 0.3, 0.9, 1.0)
        self.assertAlmostEqual(purity_bound(OddSubspaceState(1.0, 0.0), reporte), 1.0, places=15)

    def test_pureza_par_con_desbalance(self):
        cfg = symmetric_config(10.0, 0.0, 0.3)
        reporte = decoherence_report(solve_loop(cfg), cfg)
        estado = EvenSubspaceState(0.6, 0.8)
        with self.assertLogs('simulacion.decoherence', level='WARNING'):
            pureza = purity_bound(estado, reporte)
        self.assertLess(pureza, 1.0)

    def test_estado_no_normalizado(self):
        with self.assertRaises(ParametroInvalido):
            OddSubspaceState(1.0, 1.0)

    def test_valor_analitico(self):
        reporte = SimpleNamespace(avisos=(), exponent=lambda subespacio: math.log(2.0))
        estado = OddSubspaceState(1 / math.sqrt(2), 1 / math.sqrt(2))
        self.assertAlmostEqual(purity_bound(estado, reporte), 0.75, places=14)

    def test_cotas_para_estados_al_azar(self):
        rng = np.random.default_rng(17)
        for _ in range(10000):
            theta = rng.uniform(0.0, math.pi / 2)
            fase = rng.uniform(0.0, 2 * math.pi)
            exponente = rng.exponential(2.0)
            estado = OddSubspaceState(math.cos(theta), math.sin(theta) * complex(math.cos(fase), math.sin(fase)))
            reporte = SimpleNamespace(avisos=(), exponent=lambda subespacio, e=exponente: e)
            pureza = purity_bound(estado, reporte)
            minimo = math.cos(theta) ** 4 + math.sin(theta) ** 4
            self.assertGreaterEqual(pureza, minimo - 1e-12)
            self.assertLessEqual(pureza, 1.0 + 1e-12)
