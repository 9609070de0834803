import math

import numpy as np
from django.test import SimpleTestCase

from simulacion.core import ESTADOS, ESTADOS_PARES, Backend, CavityQubitParams, symmetric_config
from simulacion.excepciones import ParametroInvalido, Singularidad
from simulacion.steady_state import (ReflectionCoefficients, conditional_cavity_photon_number,
                                     emission_prefactor, reflection_coefficient_exact,
                                     reflection_coefficient_expanded,
                                     reflection_coefficient_from_factor,
                                     reflection_coefficient_nonresonant, reflection_coefficients,
                                     round_trip_factor, solve_loop)


class ReflectionCoefficientTestCase(SimpleTestCase):
    def test_resonante_sin_atomo(self):
        self.assertEqual(reflection_coefficient_expanded(10.0, 0.0, 0), 1.0)

    def test_resonante_con_atomo(self):
        self.assertAlmostEqual(reflection_coefficient_expanded(10.0, 0.0, 1), -19.0 / 21.0, places=14)

    def test_modulo_sin_atomo_y_con_atomo(self):
        for C, D in ((1.0, 0.0), (10.0, 3.0), (100.0, 100.0)):
            with self.subTest(C=C, D=D):
                self.assertAlmostEqual(abs(reflection_coefficient_expanded(C, D, 0)), 1.0, places=12)
                self.assertLess(abs(reflection_coefficient_expanded(C, D, 1)), 1.0)

    def test_limite_no_resonante(self):
        self.assertAlmostEqual(reflection_coefficient_nonresonant(100.0, 100.0, 1), 1j, places=14)
        self.assertAlmostEqual(reflection_coefficient_nonresonant(100.0, 100.0, 0), -1j, places=14)
        with self.assertRaises(ParametroInvalido):
            reflection_coefficient_nonresonant(10.0, 0.0, 1)

    def test_primer_orden_aproxima_el_exacto(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 3.0, kappa=1.0, tau=1e-5)
        for i in (0, 1):
            with self.subTest(i=i):
                exacto = reflection_coefficient_exact(cav, i)
                aproximado = reflection_coefficient_expanded(10.0, 3.0, i)
                self.assertLess(abs(exacto - aproximado), 1e-3)

    def test_gran_desintonia_se_acerca_al_limite(self):
        expandido = reflection_coefficient_expanded(1e3, 1e3, 1)
        self.assertLess(abs(expandido - reflection_coefficient_nonresonant(1e3, 1e3, 1)), 1e-2)

    def test_factor_de_vuelta(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 0.0, eta_cav=0.81)
        self.assertAlmostEqual(abs(round_trip_factor(cav, 0)), 0.9, places=14)
        self.assertLess(abs(round_trip_factor(cav, 1)), 0.9)
        with self.assertRaises(ParametroInvalido):
            round_trip_factor(cav, 2)

    def test_singularidad(self):
        with self.assertRaises(Singularidad):
            reflection_coefficient_from_factor(1.0, 1.0)

    def test_prefactor_de_emision(self):
        cav = CavityQubitParams.from_dimensionless(10.0, 3.0, kappa=2.0)
        self.assertAlmostEqual(emission_prefactor(cav, Backend.HIGH_FINESSE_FIRST_ORDER), 4.0, places=10)
        self.assertAlmostEqual(emission_prefactor(cav, Backend.NONRESONANT_LIMIT), 40.0 / 9.0, places=10)


class SolveLoopTestCase(SimpleTestCase):
    def test_sin_lazo(self):
        cfg = symmetric_config(10.0, 0.0, 0.0)
        amps = solve_loop(cfg)
        G = -19.0 / 21.0
        esperado = {(0, 0): -1.0, (0, 1): -G, (1, 0): -G, (1, 1): -G * G}
        for estado, valor in esperado.items():
            with self.subTest(estado=estado):
                self.assertAlmostEqual(amps.beta(estado), 1j * valor, places=12)

    def test_conservacion_sin_perdidas(self):
        cfg = symmetric_config(10.0, 3.0, 0.4, psi=1.1, alpha=0.7)
        amps = solve_loop(cfg)
        # sin átomos excitados no hay absorción
        self.assertAlmostEqual(abs(amps.beta((0, 0))), 0.7, places=12)

    def test_relaciones_entre_amplitudes(self):
        cfg = symmetric_config(10.0, 3.0, 0.4, eta3=0.81, psi=0.5)
        amps = solve_loop(cfg)
        loop = cfg.loop
        for estado in ESTADOS:
            a = amps[estado]
            F1 = amps.coefficients.F[(1, estado[0])]
            F2 = amps.coefficients.F[(2, estado[1])]
            with self.subTest(estado=estado):
                self.assertAlmostEqual(a.zeta2, loop.P * (loop.t3 * loop.alpha + 1j * loop.r3 * a.zeta5), places=12)
                self.assertAlmostEqual(a.zeta3, -1j * F1 * a.zeta2, places=12)
                self.assertAlmostEqual(a.zeta4, 1j * 0.9 * a.zeta3, places=12)
                self.assertAlmostEqual(a.zeta5, -1j * F2 * a.zeta4, places=12)
                self.assertAlmostEqual(a.beta, loop.t3 * a.zeta5 + 1j * loop.r3 * loop.alpha, places=12)

    def test_simetria_impar_exacta(self):
        for backend in Backend:
            D = 0.0 if backend == Backend.HIGH_FINESSE_FIRST_ORDER else 20.0
            cfg = symmetric_config(12.0, D, 0.37, psi=math.pi, backend=backend)
            amps = solve_loop(cfg)
            with self.subTest(backend=backend):
                self.assertEqual(amps.beta((1, 0)), amps.beta((0, 1)))

    def test_exacto_equivale_a_factores_impuestos(self):
        cfg = symmetric_config(10.0, 2.0, 0.3, backend=Backend.EXACT_MIRROR_ALGEBRA)
        f = {(q, i): round_trip_factor(cfg.cavity(q), i) for q in (1, 2) for i in (0, 1)}
        a = solve_loop(cfg)
        b = solve_loop(cfg, ReflectionCoefficients.from_round_trip_factors(cfg, f))
        for estado in ESTADOS:
            self.assertEqual(a.beta(estado), b.beta(estado))

    def test_campo_intracavidad_exacto(self):
        cfg = symmetric_config(10.0, 2.0, 0.3, backend=Backend.EXACT_MIRROR_ALGEBRA)
        amps = solve_loop(cfg)
        cav = cfg.cavity1
        for estado in ESTADOS:
            f = amps.coefficients.f[(1, estado[0])]
            esperado = cav.t_mirror * amps[estado].zeta2 / (1.0 - cav.r_mirror * f)
            with self.subTest(estado=estado):
                self.assertAlmostEqual(amps[estado].xi1, esperado, places=12)

    def test_campo_intracavidad_primer_orden(self):
        cfg = symmetric_config(10.0, 0.0, 0.0, kappa=1.0, tau=0.01)
        amps = solve_loop(cfg)
        # sin átomo el campo es 2 zeta2 / sqrt(kappa tau)
        self.assertAlmostEqual(amps[(0, 0)].xi1, 2.0 * amps[(0, 0)].zeta2 / 0.1, places=10)
        fotones = conditional_cavity_photon_number(amps, 1, 0, 0)
        self.assertAlmostEqual(fotones, abs(amps[(0, 0)].xi1) ** 2 * 0.01, places=12)

    def test_coeficientes_directos(self):
        cfg = symmetric_config(100.0, 100.0, 0.0, psi=math.pi, backend=Backend.NONRESONANT_LIMIT)
        coef = ReflectionCoefficients.from_reflections(reflection_coefficients(cfg).F)
        self.assertIsNone(coef.f)
        amps = solve_loop(cfg, coef)
        self.assertAlmostEqual(amps.beta((1, 1)), -1j, places=12)

    def test_lazo_singular(self):
        # |1 - r3 P F F| = 0 con r3 -> 1 y fase constructiva
        cfg = symmetric_config(100.0, 100.0, 1.0 - 1e-16, psi=math.pi, backend=Backend.NONRESONANT_LIMIT)
        with self.assertRaises(Singularidad) as ctx:
            solve_loop(cfg)
        self.assertIn(ctx.exception.estado, ESTADOS_PARES)

    def test_limite_de_gran_cooperatividad(self):
        alpha = 0.3
        amps = solve_loop(symmetric_config(1e6, 0.0, 0.0, alpha=alpha))
        self.assertAlmostEqual(amps.beta((0, 0)), -1j * alpha, places=14)
        self.assertEqual(amps.beta((1, 0)), amps.beta((0, 1)))
        self.assertLess(abs(amps.beta((1, 0)) - 1j * alpha), 1e-4 * alpha)
        self.assertLess(abs(amps.beta((1, 1)) + 1j * alpha), 1e-4 * alpha)

    def test_simetria_impar_con_parametros_al_azar(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            cfg = symmetric_config(
                rng.uniform(0.1, 200.0), rng.uniform(-50.0, 50.0), rng.uniform(0.0, 0.95),
                eta3=rng.uniform(0.5, 1.0), psi=rng.uniform(0.0, 2 * math.pi),
                alpha=rng.uniform(0.1, 2.0), eta_cav=rng.uniform(0.8, 1.0),
            )
            amps = solve_loop(cfg)
            self.assertLessEqual(abs(amps.beta((1, 0)) - amps.beta((0, 1))), 1e-14)


class PropiedadesDelLazoTestCase(SimpleTestCase):
    def test_fase_pura_conserva_la_amplitud(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            cfg = symmetric_config(rng.uniform(0.5, 50.0), rng.uniform(-10.0, 10.0), rng.uniform(0.0, 0.95),
                                   psi=rng.uniform(0.0, 2 * math.pi), alpha=0.8 * np.exp(1j * rng.uniform(0, 6)))
            f = {(q, i): complex(np.exp(1j * rng.uniform(0.0, 2 * math.pi))) for q in (1, 2) for i in (0, 1)}
            amps = solve_loop(cfg, ReflectionCoefficients.from_round_trip_factors(cfg, f))
            for estado in ESTADOS:
                with self.subTest(estado=estado):
                    self.assertAlmostEqual(abs(amps.beta(estado)), 0.8, places=12)

    def test_conjugacion_en_el_estacionario(self):
        # F1 = conj(F0), P = -1 y alpha real: beta11 = -conj(beta00), beta10 = -conj(beta01)
        rng = np.random.default_rng(8)
        for _ in range(50):
            cfg = symmetric_config(rng.uniform(0.5, 50.0), 0.0, rng.uniform(0.0, 0.95),
                                   eta3=rng.uniform(0.5, 1.0), psi=math.pi, alpha=rng.uniform(0.1, 2.0))
            F = {}
            for q in (1, 2):
                F[(q, 1)] = complex(rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, 2 * math.pi)))
                F[(q, 0)] = F[(q, 1)].conjugate()
            amps = solve_loop(cfg, ReflectionCoefficients.from_reflections(F))
            self.assertLess(abs(amps.beta((1, 1)) + amps.beta((0, 0)).conjugate()), 1e-12)
            self.assertLess(abs(amps.beta((1, 0)) + amps.beta((0, 1)).conjugate()), 1e-12)

    def test_conjugacion_en_el_limite_no_resonante(self):
        cfg = symmetric_config(50.0, 40.0, 0.6, eta3=0.8, psi=math.pi, alpha=1.3,
                               backend=Backend.NONRESONANT_LIMIT)
        amps = solve_loop(cfg)
        self.assertLess(abs(amps.beta((1, 1)) + amps.beta((0, 0)).conjugate()), 1e-12)
        self.assertLess(abs(amps.beta((1, 0)) + amps.beta((0, 1)).conjugate()), 1e-12)

    def test_cota_de_la_reflexion(self):
        rng = np.random.default_rng(12)
        modulos = rng.uniform(0.0, 1.0, 10000)
        fases = rng.uniform(0.0, 2 * math.pi, 10000)
        espejos = rng.uniform(0.0, 0.999, 10000)
        for rho, fase, r in zip(modulos, fases, espejos):
            F = reflection_coefficient_from_factor(complex(rho * np.exp(1j * fase)), float(r))
            self.assertLessEqual(abs(F), 1.0 + 1e-12)

    def test_primer_orden_converge_como_t_cuadrado(self):
        primer_orden = solve_loop(symmetric_config(10.0, 3.0, 0.3, psi=0.5, kappa=1.0, tau=1e-3))

        def error(tau):
            cfg = symmetric_config(10.0, 3.0, 0.3, psi=0.5, kappa=1.0, tau=tau,
                                   backend=Backend.EXACT_MIRROR_ALGEBRA)
            exacto = solve_loop(cfg)
            return max(abs(exacto.beta(e) - primer_orden.beta(e)) for e in ESTADOS)

        # t^2 = kappa tau se reduce a la mitad
        cociente = error(1e-3) / error(5e-4)
        self.assertGreater(cociente, 1.6)
        self.assertLess(cociente, 2.4)
