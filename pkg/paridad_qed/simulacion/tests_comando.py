import csv
import io
import json
import os
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from simulacion.configuracion import parse_config, read_config

VALIDA = """
C = 100
D = 100
r3 = 0.0
backend = nonresonant_limit
seed = 5
"""

# |1 - r3| = 0.05 queda por debajo de M/C = 0.1
LAZO_CRITICO = """
C = 100
D = 100
r3 = 0.95
backend = nonresonant_limit
"""


class ComandoMixin:
    def setUp(self):
        temporal = tempfile.TemporaryDirectory()
        self.addCleanup(temporal.cleanup)
        self.directorio = temporal.name

    def config(self, texto, nombre='corrida.cfg'):
        ruta = os.path.join(self.directorio, nombre)
        with open(ruta, 'w', encoding='utf-8') as archivo:
            archivo.write(texto)
        return ruta

    def ejecutar(self, *args):
        out = io.StringIO()
        err = io.StringIO()
        call_command('paritysim', *args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def filas(self, texto):
        return list(csv.reader(io.StringIO(texto)))


class OptimizeCommandTestCase(ComandoMixin, SimpleTestCase):
    def test_resonante(self):
        out, _ = self.ejecutar('optimize', '--case', 'resonant', '--C', '10')
        lineas = out.splitlines()
        self.assertEqual(lineas[0], 'r3_opt=0.818594')
        self.assertIn('case=resonant', lineas)

    def test_no_resonante(self):
        out, _ = self.ejecutar('optimize', '--case', 'nonresonant', '--C', '100', '--doc', '1.38742')
        valores = dict(linea.split('=', 1) for linea in out.splitlines())
        self.assertAlmostEqual(float(valores['r3_opt']), 0.26795, places=4)
        self.assertAlmostEqual(float(valores['re_F2']), -0.8, places=5)

    def test_numerico_con_restriccion_activa(self):
        ruta = self.config(VALIDA)
        out, _ = self.ejecutar('optimize', '--config', ruta, '--numeric', '--margin', '10')
        valores = dict(linea.split('=', 1) for linea in out.splitlines())
        self.assertEqual(valores['constraint_active'], 'true')
        self.assertAlmostEqual(float(valores['r_max']), 0.9, places=9)

    def test_json(self):
        out, _ = self.ejecutar('optimize', '--case', 'resonant', '--C', '10', '--format', 'json')
        datos = json.loads(out)
        self.assertAlmostEqual(datos['r3_opt'], 361.0 / 441.0, places=12)
        self.assertEqual(datos['case'], 'resonant')

    def test_sin_cooperatividad(self):
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('optimize', '--case', 'resonant')
        self.assertEqual(cm.exception.returncode, 2)


class SweepCommandTestCase(ComandoMixin, SimpleTestCase):
    def test_barrido_csv(self):
        out, _ = self.ejecutar('sweep', '--case', 'nonresonant', '--doc', '1', '--to', '0.8', '--steps', '5')
        filas = self.filas(out)
        self.assertEqual(filas[0], ['r3', 'nu_odd_se_tm_C', 'nu_even_se_tm_C', 'nu_odd_loss_tm',
                                    'nu_even_loss_tm', 'flags'])
        self.assertEqual(len(filas), 6)
        for fila in filas[1:]:
            r = float(fila[0])
            self.assertAlmostEqual(float(fila[1]), (1.0 - r) / (1.0 + r), places=9)
            self.assertEqual(fila[-1], '')

    def test_barrido_a_archivo(self):
        destino = os.path.join(self.directorio, 'barrido.csv')
        out, err = self.ejecutar('sweep', '--case', 'resonant', '--C', '10', '--steps', '4', '--out', destino)
        self.assertEqual(out, '')
        self.assertIn(destino, err)
        with open(destino, encoding='utf-8') as archivo:
            self.assertEqual(len(self.filas(archivo.read())), 5)
        self.assertEqual(os.listdir(self.directorio), ['barrido.csv'])

    def test_especificacion_invalida(self):
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('sweep', '--case', 'resonant', '--to', '1.0')
        self.assertEqual(cm.exception.returncode, 2)


class ReportesCommandTestCase(ComandoMixin, SimpleTestCase):
    def test_tasas_en_texto(self):
        out, _ = self.ejecutar('rates', '--config', self.config(VALIDA))
        claves = [linea.split('=', 1)[0] for linea in out.splitlines()]
        self.assertEqual(claves[:3], ['t_m', 't_m00', 't_m11'])
        self.assertIn('loop_importance', claves)

    def test_tasas_en_json(self):
        out, _ = self.ejecutar('rates', '--config', self.config(VALIDA), '--format', 'json')
        datos = json.loads(out)
        self.assertGreater(datos['t_m'], 0.0)
        self.assertEqual(len(datos['odd_se_products']), 2)
        self.assertIsInstance(datos['avisos'], list)

    def test_formas_cerradas(self):
        ruta = self.config(VALIDA)
        generico, _ = self.ejecutar('rates', '--config', ruta, '--format', 'json')
        cerrado, _ = self.ejecutar('rates', '--config', ruta, '--format', 'json', '--closed-form')
        a, b = json.loads(generico)['t_m'], json.loads(cerrado)['t_m']
        self.assertLess(abs(a - b) / abs(a), 1e-9)

    def test_formas_cerradas_con_cavidades_distintas(self):
        ruta = self.config('C = 10\nC2 = 20\nr3 = 0.3\n')
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('rates', '--config', ruta, '--closed-form')
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn('idénticas', str(cm.exception))

    def test_forma_cerrada_resonante_sin_t_m00(self):
        ruta = self.config('C = 10\nr3 = 0.3\n')
        out, _ = self.ejecutar('rates', '--config', ruta, '--format', 'json', '--closed-form')
        datos = json.loads(out)
        self.assertIsNone(datos['t_m00'])
        self.assertEqual(datos['t_m11'], datos['t_m'])

    def test_amplitudes(self):
        filas = self.filas(self.ejecutar('amplitudes', '--config', self.config(VALIDA))[0])
        self.assertEqual(len(filas), 5)
        self.assertEqual(filas[0][:3], ['state', 'zeta1_re', 'zeta1_im'])
        self.assertEqual([f[0] for f in filas[1:]], ['00', '01', '10', '11'])

    def test_transitorio(self):
        filas = self.filas(self.ejecutar('transient', '--config', self.config(VALIDA), '--steps', '10')[0])
        self.assertEqual(len(filas), 11)
        self.assertEqual(filas[0][:4], ['n', 't', 'alpha_re', 'alpha_im'])

    def test_transitorio_con_retardo(self):
        filas = self.filas(self.ejecutar('transient', '--config', self.config(VALIDA), '--steps', '3',
                                         '--delay', '2')[0])
        self.assertEqual(len(filas), 4)
        self.assertAlmostEqual(float(filas[1][1]), 0.02, places=12)
        self.assertAlmostEqual(float(filas[3][1]), 0.04, places=12)

    def test_homodino(self):
        with self.assertLogs('simulacion.homodyne', level='WARNING'):
            out, _ = self.ejecutar('homodyne', '--config', self.config(VALIDA), '--trajectories', '200',
                                   '--workers', '1')
        valores = dict(linea.split('=', 1) for linea in out.splitlines())
        self.assertEqual(valores['seed'], '5')
        self.assertEqual(valores['n_traj'], '200')
        self.assertIn(valores['pair'], ('00', '11'))


class ValidateCommandTestCase(ComandoMixin, SimpleTestCase):
    def test_valida(self):
        out, err = self.ejecutar('validate', '--config', self.config(VALIDA))
        self.assertEqual(len(self.filas(out)), 5)
        self.assertIn('satisfecha', err)

    def test_lazo_critico(self):
        out = io.StringIO()
        with self.assertLogs('simulacion.core', level='WARNING'):
            with self.assertRaises(CommandError) as cm:
                call_command('paritysim', 'validate', '--config', self.config(LAZO_CRITICO),
                             stdout=out, stderr=io.StringIO())
        self.assertEqual(cm.exception.returncode, 2)
        filas = self.filas(out.getvalue())
        self.assertIn('false', [fila[-1] for fila in filas[1:]])


class ConfiguracionCommandTestCase(ComandoMixin, SimpleTestCase):
    def test_sin_configuracion(self):
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('rates')
        self.assertEqual(cm.exception.returncode, 2)

    def test_error_de_lectura(self):
        ruta = self.config('C = 10\nfoo = 2\n')
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('rates', '--config', ruta)
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn('línea 2', str(cm.exception))

    def test_volcado(self):
        ruta = self.config(VALIDA)
        out, _ = self.ejecutar('rates', '--config', ruta, '--dump-config')
        self.assertEqual(parse_config(out), read_config(ruta))

    def test_volcado_sin_configuracion(self):
        with self.assertRaises(CommandError) as cm:
            self.ejecutar('validate', '--dump-config')
        self.assertEqual(cm.exception.returncode, 2)
