import math
import os
import tempfile

from django.test import SimpleTestCase, override_settings

from simulacion.configuracion import dump_config, parse_config, read_config
from simulacion.core import Backend
from simulacion.excepciones import ErrorDeLectura

NO_RESONANTE = """
# dos cavidades iguales, límite no resonante
C = 100
D = 100
r3 = 0.3   # divisor del lazo
eta3 = 0.95
backend = nonresonant_limit
seed = 42
"""


class LecturaTestCase(SimpleTestCase):
    def test_lectura_basica(self):
        run = parse_config(NO_RESONANTE)
        self.assertEqual(run.case, 'nonresonant')
        self.assertEqual(run.protect, 'odd')
        self.assertEqual(run.seed, 42)
        self.assertEqual(run.system.backend, Backend.NONRESONANT_LIMIT)
        self.assertAlmostEqual(run.system.loop.r3, 0.3)
        self.assertEqual(run.system.loop.P, complex(-1.0, 0.0))
        self.assertAlmostEqual(run.system.cavity2.C, 100.0, places=10)

    def test_errores_con_numero_de_linea(self):
        casos = [
            ('C = 10\nfoo = 1\n', 2),
            ('C = 10\nr3 = 0.2\nC = 20\n', 3),
            ('C = 10\nr3 0.2\n', 2),
            ('= 3\n', 1),
            ('C = 10\n\n# nada\nr3 = 1.5\n', 4),
            ('C = diez\n', 1),
        ]
        for texto, linea in casos:
            with self.subTest(texto=texto):
                with self.assertRaises(ErrorDeLectura) as cm:
                    parse_config(texto)
                self.assertEqual(cm.exception.linea, linea)
                self.assertIn(f'línea {linea}', cm.exception.messages[0])

    def test_alpha_y_alpha2_excluyentes(self):
        with self.assertRaises(ErrorDeLectura) as cm:
            parse_config('C = 10\nalpha = 1\nalpha2 = 4\n')
        self.assertIn('excluyentes', cm.exception.messages[0])

    def test_alpha2(self):
        run = parse_config('C = 10\nalpha2 = 4\n')
        self.assertEqual(run.system.loop.alpha, complex(2.0, 0.0))

    def test_falta_la_cooperatividad(self):
        with self.assertRaises(ErrorDeLectura):
            parse_config('D = 3\n')

    def test_resonante_con_desintonia(self):
        with self.assertRaises(ErrorDeLectura):
            parse_config('C = 10\nD = 3\ncase = resonant\n')

    def test_cavidad_por_separado(self):
        run = parse_config('C = 10\nC2 = 20\n')
        self.assertAlmostEqual(run.system.cavity1.C, 10.0, places=10)
        self.assertAlmostEqual(run.system.cavity2.C, 20.0, places=10)
        with self.assertRaises(ErrorDeLectura):
            parse_config('C = 10\neta_cav2 = 1.5\n')

    def test_fase_por_defecto(self):
        casos = [
            ('C = 10\n', 0.0),
            ('C = 10\nD = 5\n', math.pi),
            ('C = 10\nprotect = even\n', math.pi),
            ('C = 10\nD = 5\nprotect = even\n', 0.0),
            ('C = 10\npsi = 0.25\n', 0.25),
        ]
        for texto, psi in casos:
            with self.subTest(texto=texto):
                self.assertAlmostEqual(parse_config(texto).system.loop.psi, psi, places=15)

    def test_backend_de_primer_orden_necesita_desintonia_automatica(self):
        with self.assertRaises(ErrorDeLectura):
            parse_config('C = 10\nauto_detuning = false\n')
        run = parse_config('C = 10\nauto_detuning = false\nbackend = exact\n')
        self.assertFalse(run.system.cavity1.auto_detuning)

    @override_settings(PARITYSIM={'DEFAULT_TAU': 0.02, 'CONSTRAINT_MARGIN': 5.0})
    def test_valores_por_defecto_de_settings(self):
        run = parse_config('C = 10\n')
        self.assertEqual(run.values['tau1'], 0.02)
        self.assertEqual(run.system.constraint_margin, 5.0)


class VolcadoTestCase(SimpleTestCase):
    def test_ida_y_vuelta(self):
        textos = [
            NO_RESONANTE,
            'C = 10\nC2 = 12.5\nr3 = 0.6\nalpha2 = 0.5\nkappa = 2\ntau = 0.005\n',
            'C = 10\nD = -3\nprotect = even\nauto_detuning = false\nbackend = exact\n',
        ]
        for texto in textos:
            with self.subTest(texto=texto):
                run = parse_config(texto)
                self.assertEqual(parse_config(dump_config(run)), run)

    def test_volcado_sin_semilla(self):
        self.assertNotIn('seed', dump_config(parse_config('C = 10\n')))


class ArchivoTestCase(SimpleTestCase):
    def test_lectura_de_archivo(self):
        with tempfile.TemporaryDirectory() as directorio:
            ruta = os.path.join(directorio, 'corrida.cfg')
            with open(ruta, 'w', encoding='utf-8') as archivo:
                archivo.write(NO_RESONANTE)
            run = read_config(ruta)
        self.assertEqual(run.path, ruta)
        self.assertEqual(run, parse_config(NO_RESONANTE))

    def test_archivo_inexistente(self):
        with self.assertRaises(ErrorDeLectura):
            read_config('/no/existe/corrida.cfg')
