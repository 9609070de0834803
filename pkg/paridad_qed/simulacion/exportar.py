"""
Escritura de tablas de resultados.

- CSV: separador coma, punto decimal, formato %.12g, UTF-8 y fin de línea LF
- XLSX: hoja con la tabla y un gráfico de líneas (xlsxwriter, o openpyxl si
  xlsxwriter no está instalado; si no hay ninguna se cae a CSV)

Toda escritura a archivo es atómica: se escribe un temporal en el mismo
directorio y se reemplaza el destino con os.replace.
"""

import csv
import io
import logging
import math
import os
import sys
import tempfile

logger = logging.getLogger(__name__)


def formatear(valor):
    """Representación de celda independiente del locale."""
    if valor is None:
        return ''
    if isinstance(valor, bool):
        return 'true' if valor else 'false'
    if isinstance(valor, (tuple, list)):
        return ';'.join(formatear(v) for v in valor)
    if isinstance(valor, (int, float)):
        if isinstance(valor, float) and math.isinf(valor):
            return 'inf' if valor > 0 else '-inf'
        return '%.12g' % valor
    return str(valor)


def escribir_atomico(ruta, contenido, binario=False):
    directorio = os.path.dirname(os.path.abspath(ruta))
    fd, temporal = tempfile.mkstemp(dir=directorio, prefix='.paritysim-', suffix='.tmp')
    try:
        modo = 'wb' if binario else 'w'
        opciones = {} if binario else {'encoding': 'utf-8', 'newline': ''}
        with os.fdopen(fd, modo, **opciones) as archivo:
            archivo.write(contenido)
        os.replace(temporal, ruta)
    except BaseException:
        if os.path.exists(temporal):
            os.unlink(temporal)
        raise
    logger.info(f'Archivo escrito: {ruta}')


def tabla_csv(encabezado, filas):
    salida = io.StringIO()
    writer = csv.writer(salida, lineterminator='\n')
    writer.writerow(encabezado)
    for fila in filas:
        writer.writerow([formatear(v) for v in fila])
    return salida.getvalue()


def escribir_csv(encabezado, filas, ruta=None, stream=None):
    """Escribe la tabla en ruta (atómico) o en stream (stdout por defecto)."""
    texto = tabla_csv(encabezado, filas)
    if ruta:
        escribir_atomico(ruta, texto)
    else:
        (stream or sys.stdout).write(texto)
    return texto


def _celda(valor):
    if valor is None or (isinstance(valor, float) and not math.isfinite(valor)):
        return None
    if isinstance(valor, (tuple, list)):
        return formatear(valor)
    return valor


# Exportar barrido a Excel con gráfico (xlsxwriter u openpyxl). Fallback a CSV si ninguna está instalada.
def exportar_xlsx(encabezado, filas, ruta, titulo='Barrido', series=None):
    """
    Guarda la tabla y un gráfico de las columnas `series` (índices) contra la
    primera columna. Devuelve el motor usado: 'xlsxwriter', 'openpyxl' o 'csv'.
    """
    series = list(series) if series is not None else list(range(1, len(encabezado)))
    ultima = len(filas)

    try:
        import xlsxwriter
        output = io.BytesIO()
        workbook = xlsxwriter.Workbook(output, {'in_memory': True, 'nan_inf_to_errors': True})
        worksheet = workbook.add_worksheet(titulo)

        header_format = workbook.add_format({
            'bold': True,
            'bg_color': '#4F81BD',
            'font_color': 'white',
            'align': 'center',
            'border': 1,
        })
        numero_format = workbook.add_format({'num_format': '0.000000', 'border': 1})

        worksheet.set_column(0, len(encabezado) - 1, 18)
        for col, nombre in enumerate(encabezado):
            worksheet.write(0, col, nombre, header_format)
        for fila_num, fila in enumerate(filas, start=1):
            for col, valor in enumerate(fila):
                celda = _celda(valor)
                if isinstance(celda, (int, float)) and not isinstance(celda, bool):
                    worksheet.write_number(fila_num, col, celda, numero_format)
                elif celda is not None:
                    worksheet.write(fila_num, col, celda)

        chart = workbook.add_chart({'type': 'scatter', 'subtype': 'straight'})
        for col in series:
            chart.add_series({
                'name': [titulo, 0, col],
                'categories': [titulo, 1, 0, ultima, 0],
                'values': [titulo, 1, col, ultima, col],
            })
        chart.set_title({'name': titulo})
        chart.set_x_axis({'name': encabezado[0]})
        chart.set_y_axis({'name': 'nu t_m'})
        worksheet.insert_chart(1, len(encabezado) + 1, chart, {'x_scale': 1.5, 'y_scale': 1.5})

        workbook.close()
        escribir_atomico(ruta, output.getvalue(), binario=True)
        return 'xlsxwriter'

    except ImportError:
        # Si xlsxwriter no está disponible, intentar con openpyxl
        try:
            from openpyxl import Workbook
            from openpyxl.chart import Reference, ScatterChart, Series
            from openpyxl.styles import Font, PatternFill

            wb = Workbook()
            ws = wb.active
            ws.title = titulo

            header_fill = PatternFill(start_color='4F81BD', end_color='4F81BD', fill_type='solid')
            header_font = Font(color='FFFFFF', bold=True)
            for col, nombre in enumerate(encabezado, 1):
                cell = ws.cell(row=1, column=col, value=nombre)
                cell.fill = header_fill
                cell.font = header_font
            for fila_num, fila in enumerate(filas, start=2):
                for col, valor in enumerate(fila, 1):
                    ws.cell(row=fila_num, column=col, value=_celda(valor))

            chart = ScatterChart()
            chart.title = titulo
            chart.x_axis.title = encabezado[0]
            chart.y_axis.title = 'nu t_m'
            xs = Reference(ws, min_col=1, min_row=2, max_row=ultima + 1)
            for col in series:
                ys = Reference(ws, min_col=col + 1, min_row=1, max_row=ultima + 1)
                chart.series.append(Series(ys, xs, title_from_data=True))
            ws.add_chart(chart, 'H2')

            output = io.BytesIO()
            wb.save(output)
            escribir_atomico(ruta, output.getvalue(), binario=True)
            return 'openpyxl'

        except ImportError:
            # Sin bibliotecas de Excel: CSV al lado del destino pedido
            logger.warning('Ni xlsxwriter ni openpyxl están instalados; se exporta CSV')
            escribir_csv(encabezado, filas, ruta=os.path.splitext(ruta)[0] + '.csv')
            return 'csv'
