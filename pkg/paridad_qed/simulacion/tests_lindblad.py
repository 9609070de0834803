import cmath
import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, override_settings

from simulacion.core import CavityQubitParams
from simulacion.excepciones import CorteInsuficiente, ErrorDeIntegracion, ParametroInvalido
from simulacion.lindblad import (VERIFICAR_CADA, DensityMatrix, IntegratorConfig, LightAtomParams,
                                 adequate_cutoff, coherent_amplitudes, compare_elimination,
                                 evolve_full, evolve_reduced, _generador_completo, _Lindblad)
from simulacion.steady_state import round_trip_factor


class EstadosTestCase(SimpleTestCase):
    def test_amplitudes_coherentes(self):
        amplitudes = coherent_amplitudes(0.5, 12)
        self.assertAlmostEqual(np.linalg.norm(amplitudes), 1.0, places=14)
        n = np.arange(12)
        self.assertAlmostEqual(float(np.sum(n * np.abs(amplitudes) ** 2)), 0.25, places=8)

    def test_estado_producto(self):
        rho = DensityMatrix.product_state(1, 0.5, atom_levels=3, cutoff=12)
        self.assertEqual(rho.dim, 36)
        self.assertAlmostEqual(rho.trace(), 1.0, places=14)
        self.assertAlmostEqual(rho.purity(), 1.0, places=12)
        self.assertAlmostEqual(rho.atom_population(1), 1.0, places=14)
        self.assertAlmostEqual(rho.field_expectation(), 0.5, places=8)

    def test_corte_se_duplica(self):
        with self.assertLogs('simulacion.lindblad', level='WARNING'):
            corte = adequate_cutoff(3.0, 8)
        self.assertGreater(corte, 8)

    @override_settings(PARITYSIM={'FOCK_CUTOFF_MAX': 16})
    def test_corte_insuficiente(self):
        with self.assertRaises(CorteInsuficiente):
            adequate_cutoff(5.0, 8)

    def test_nivel_fuera_de_rango(self):
        with self.assertRaises(ParametroInvalido):
            DensityMatrix.product_state(3, 0.5, atom_levels=3, cutoff=8)

    def test_configuracion_invalida(self):
        for kwargs in (dict(cutoff=3), dict(h=-0.1), dict(scheme='euler'), dict(generator='otro')):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ParametroInvalido):
                    IntegratorConfig(**kwargs)


class IntegracionTestCase(SimpleTestCase):
    def test_traza_y_positividad(self):
        params = LightAtomParams(g=1.0, Gamma=1.0, Delta=1.0)
        rho0 = DensityMatrix.product_state(1, 0.5, atom_levels=3, cutoff=10)
        rho = evolve_full(rho0, params, 2.0, IntegratorConfig(cutoff=10))
        self.assertAlmostEqual(rho.trace(), 1.0, places=10)
        self.assertLess(rho.hermiticity_error(), 1e-12)
        self.assertGreater(rho.min_eigenvalue(), -1e-8)
        self.assertAlmostEqual(rho.time, 2.0, places=12)
        self.assertGreater(rho.max_excited, 0.0)

    def test_orden_rk4(self):
        params = LightAtomParams(g=1.0, Gamma=1.0, Delta=1.0)
        rho0 = DensityMatrix.product_state(1, 0.5, atom_levels=3, cutoff=10)
        generador = _Lindblad(*_generador_completo(params, 10))

        def evolucion(h):
            rho = rho0.data.copy()
            for _ in range(int(round(2.0 / h))):
                rho = generador.rk4_step(rho, h)
            return rho

        referencia = evolucion(0.0125)
        error_grueso = np.max(np.abs(evolucion(0.1) - referencia))
        error_fino = np.max(np.abs(evolucion(0.05) - referencia))
        cociente = error_grueso / error_fino
        self.assertGreater(cociente, 8.0)
        self.assertLess(cociente, 32.0)

    def test_reducido_es_exacto_para_estados_coherentes(self):
        params = LightAtomParams(g=0.3, Gamma=1.0, Delta=1.0)
        xi0 = 0.7
        rho0 = DensityMatrix.product_state(1, xi0, atom_levels=2, cutoff=16)
        t = 3.0
        rho = evolve_reduced(rho0, params, t, IntegratorConfig(cutoff=16, h=0.01, generator='reduced'))
        corrimiento = -params.Delta * params.g ** 2 / params.denominador
        tasa = params.Gamma * params.g ** 2 / params.denominador
        esperado = xi0 * cmath.exp((-1j * corrimiento - tasa / 2.0) * t)
        self.assertAlmostEqual(rho.field_expectation(), esperado, places=8)
        self.assertAlmostEqual(rho.atom_population(1), 1.0, places=10)

    def test_niveles_atomicos(self):
        params = LightAtomParams(g=0.1, Gamma=1.0)
        with self.assertRaises(ParametroInvalido):
            evolve_full(DensityMatrix.product_state(1, 0.5, atom_levels=2, cutoff=10), params, 1.0)
        with self.assertRaises(ParametroInvalido):
            evolve_reduced(DensityMatrix.product_state(1, 0.5, atom_levels=3, cutoff=10), params, 1.0)


class EliminacionAdiabaticaTestCase(SimpleTestCase):
    def _reporte(self, g2):
        params = LightAtomParams(g=math.sqrt(g2), Gamma=1.0, Delta=1.0)
        return compare_elimination(params, math.sqrt(0.5), 5.0, IntegratorConfig(cutoff=12, h=0.005))

    def test_cociente_de_la_condicion(self):
        self.assertAlmostEqual(self._reporte(2.5e-3).condition_ratio, 1e-3, places=12)

    def test_desviacion_pequena_en_regimen_debil(self):
        reporte = self._reporte(2.5e-3)
        self.assertLess(reporte.field_deviation, 1e-2)
        self.assertLess(reporte.population_deviation, 1e-2)
        self.assertLess(reporte.max_excited, 1e-2)
        self.assertEqual(reporte.steps, 1000)
        self.assertEqual(reporte.cutoff, 12)

    def test_desviacion_crece_con_el_acople(self):
        debil = self._reporte(2.5e-3)
        fuerte = self._reporte(2.5e-2)
        self.assertGreater(fuerte.field_deviation, debil.field_deviation)
        self.assertGreater(fuerte.max_excited, debil.max_excited)

    def test_desde_cavidad(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 2.0)
        params = LightAtomParams.from_cavity(cav)
        self.assertEqual(params.g, cav.g)
        self.assertEqual(params.Delta, cav.Delta)
        self.assertAlmostEqual(params.condition_ratio(1.0), cav.g ** 2 / 1.25, places=12)


class CasosLimiteTestCase(SimpleTestCase):
    def test_atomo_en_cero_no_toca_el_campo(self):
        params = LightAtomParams(g=1.0, Gamma=1.0, Delta=1.0)
        rho0 = DensityMatrix.product_state(0, 0.5, atom_levels=3, cutoff=10)
        rho = evolve_full(rho0, params, 1.0, IntegratorConfig(cutoff=10, h=0.01))
        self.assertLess(np.max(np.abs(rho.data - rho0.data)), 1e-12)
        self.assertAlmostEqual(rho.atom_population(0), 1.0, places=12)
        self.assertAlmostEqual(rho.field_expectation(), rho0.field_expectation(), places=12)

    def test_decaimiento_puro(self):
        params = LightAtomParams(g=0.0, Gamma=1.0)
        rho0 = DensityMatrix.product_state(2, 0.0, atom_levels=3, cutoff=8)
        rho = evolve_full(rho0, params, 1.0, IntegratorConfig(cutoff=8, h=0.01))
        self.assertAlmostEqual(rho.atom_population(2), math.exp(-1.0), places=8)
        self.assertAlmostEqual(rho.atom_population(2), 0.367879, places=6)
        self.assertAlmostEqual(rho.atom_population(1), 1.0 - math.exp(-1.0), places=8)

    def test_reducido_reproduce_el_factor_de_vuelta(self):
        # g = 1, Gamma = 1, Delta = 0, tau = 0.01: |<a>(t)/<a>(0)| = exp(-0.02)
        cav = CavityQubitParams.from_dimensionless(2.0, 0.0, kappa=1.0, tau=0.01)
        params = LightAtomParams.from_cavity(cav)
        self.assertAlmostEqual(params.g, 1.0, places=14)
        xi0 = 0.5
        rho0 = DensityMatrix.product_state(1, xi0, atom_levels=2, cutoff=16)
        rho = evolve_reduced(rho0, params, cav.tau, IntegratorConfig(cutoff=16, h=1e-4, generator='reduced'))
        cociente = rho.field_expectation() / xi0
        self.assertLess(abs(cociente - round_trip_factor(cav, 1)), 1e-6)
        self.assertAlmostEqual(abs(cociente), 0.9801987, places=7)

    def test_fase_con_desintonia(self):
        cav = CavityQubitParams.from_dimensionless(2.0, 10.0, kappa=1.0, tau=0.01,
                                                   auto_detuning=False, delta_cav=0.0)
        params = LightAtomParams.from_cavity(cav)
        self.assertAlmostEqual(params.Delta, 5.0, places=14)
        xi0 = 0.5
        rho0 = DensityMatrix.product_state(1, xi0, atom_levels=2, cutoff=16)
        rho = evolve_reduced(rho0, params, cav.tau, IntegratorConfig(cutoff=16, h=1e-4, generator='reduced'))
        cociente = rho.field_expectation() / xi0
        self.assertAlmostEqual(cmath.phase(cociente), 5.0 / 25.25 * 0.01, places=10)
        self.assertAlmostEqual(cmath.phase(cociente), 1.9802e-3, places=7)
        self.assertLess(abs(cociente - round_trip_factor(cav, 1)), 1e-6)


class VerificacionDuranteLaIntegracionTestCase(SimpleTestCase):
    def setUp(self):
        self.params = LightAtomParams(g=1.0, Gamma=1.0, Delta=1.0)
        self.rho0 = DensityMatrix.product_state(1, 0.5, atom_levels=3, cutoff=10)
        self.config = IntegratorConfig(cutoff=10, h=0.01)
        self.pasos = []

    def _paso_alterado(self, en_paso, alterar):
        original = _Lindblad.rk4_step

        def paso(generador, rho, h):
            self.pasos.append(h)
            nuevo = original(generador, rho, h)
            return alterar(nuevo) if len(self.pasos) == en_paso else nuevo

        return mock.patch.object(_Lindblad, 'rk4_step', autospec=True, side_effect=paso)

    def test_traza_alterada_se_detecta_antes_del_final(self):
        with self._paso_alterado(10, lambda rho: 1.01 * rho):
            with self.assertRaisesRegex(ErrorDeIntegracion, 'Traza'):
                evolve_full(self.rho0, self.params, 2.0, self.config)
        self.assertEqual(len(self.pasos), VERIFICAR_CADA)

    def test_violacion_pasajera_se_detecta(self):
        # la parte antihermítica desaparece en el paso siguiente al simetrizar
        antihermitica = 1e-6j * np.eye(self.rho0.dim)
        with self._paso_alterado(VERIFICAR_CADA, lambda rho: rho + antihermitica):
            with self.assertRaisesRegex(ErrorDeIntegracion, 'hermítica'):
                evolve_full(self.rho0, self.params, 2.0, self.config)
        self.assertEqual(len(self.pasos), VERIFICAR_CADA)

    def test_sin_alteraciones_termina(self):
        with self._paso_alterado(0, lambda rho: rho):
            rho = evolve_full(self.rho0, self.params, 2.0, self.config)
        self.assertEqual(len(self.pasos), 200)
        self.assertAlmostEqual(rho.time, 2.0, places=12)
