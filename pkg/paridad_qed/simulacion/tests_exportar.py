import os
import tempfile

from django.test import SimpleTestCase

from simulacion.exportar import escribir_atomico, exportar_xlsx, formatear, tabla_csv


class FormatoTestCase(SimpleTestCase):
    def test_formatear(self):
        casos = [
            (None, ''),
            (True, 'true'),
            (0.1, '0.1'),
            (1.0 / 3.0, '0.333333333333'),
            (float('inf'), 'inf'),
            (7, '7'),
            (('polo', 'fuera'), 'polo;fuera'),
            ('11', '11'),
        ]
        for valor, esperado in casos:
            with self.subTest(valor=valor):
                self.assertEqual(formatear(valor), esperado)

    def test_tabla_csv(self):
        texto = tabla_csv(['r3', 'valor'], [[0.0, 1.0], [0.5, None]])
        self.assertEqual(texto, 'r3,valor\n0,1\n0.5,\n')


class EscrituraTestCase(SimpleTestCase):
    def setUp(self):
        temporal = tempfile.TemporaryDirectory()
        self.addCleanup(temporal.cleanup)
        self.directorio = temporal.name

    def test_escritura_atomica(self):
        ruta = os.path.join(self.directorio, 'salida.csv')
        escribir_atomico(ruta, 'a,b\n')
        escribir_atomico(ruta, 'c,d\n')
        with open(ruta, encoding='utf-8') as archivo:
            self.assertEqual(archivo.read(), 'c,d\n')
        self.assertEqual(os.listdir(self.directorio), ['salida.csv'])

    def test_excel(self):
        ruta = os.path.join(self.directorio, 'barrido.xlsx')
        motor = exportar_xlsx(['r3', 'a', 'b'], [[0.0, 1.0, None], [0.5, 0.3, 0.2]], ruta)
        self.assertEqual(motor, 'xlsxwriter')
        self.assertGreater(os.path.getsize(ruta), 0)
