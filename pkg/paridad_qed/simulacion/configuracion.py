"""
Lectura y escritura de archivos de configuración `key = value`.

Formato: una asignación por línea, `#` inicia un comentario, las líneas en
blanco se ignoran. Las claves desconocidas o repetidas son un error y todo
error se informa con su número de línea.
"""

import logging
import math
import os
from dataclasses import dataclass, field

from .excepciones import ErrorDeLectura
from .forms import CAVIDAD, ConfiguracionForm

logger = logging.getLogger(__name__)

# Orden canónico para --dump-config
ORDEN = (
    [f'{n}{q}' for q in (1, 2) for n in CAVIDAD]
    + ['r3', 'eta3', 'psi', 'alpha', 'case', 'protect', 'backend', 'auto_detuning',
       'validity_threshold', 'constraint_margin', 'seed']
)


@dataclass(frozen=True)
class RunConfig:
    system: object
    case: str
    protect: str
    seed: int
    values: dict
    path: str = field(default=None, compare=False)

    @property
    def resonant(self):
        return self.case == 'resonant'


def _lineas(text):
    pares = {}
    lineas = {}
    for numero, cruda in enumerate(text.splitlines(), start=1):
        linea = cruda.split('#', 1)[0].strip()
        if not linea:
            continue
        if '=' not in linea:
            raise ErrorDeLectura(f'se esperaba "clave = valor" y se leyó "{cruda.strip()}"', numero)
        clave, valor = (parte.strip() for parte in linea.split('=', 1))
        if not clave:
            raise ErrorDeLectura('clave vacía', numero)
        if clave not in ConfiguracionForm.claves():
            raise ErrorDeLectura(f'clave desconocida "{clave}"', numero)
        if clave in pares:
            raise ErrorDeLectura(f'clave repetida "{clave}" (ya definida en la línea {lineas[clave]})', numero)
        pares[clave] = valor
        lineas[clave] = numero
    return pares, lineas


def parse_config(text, path=None):
    """Valida el texto y devuelve un RunConfig con todos los valores resueltos."""
    pares, lineas = _lineas(text)
    form = ConfiguracionForm(data=pares)
    if not form.is_valid():
        campo, mensajes = next(iter(form.errors.items()))
        linea = lineas.get(campo)
        etiqueta = '' if campo == '__all__' else f'{campo}: '
        raise ErrorDeLectura(f'{etiqueta}{mensajes[0]}', linea)

    res = form.cleaned_data['resueltos']
    logger.debug(f'Configuración leída con {len(pares)} claves')
    return RunConfig(
        system=form.cleaned_data['system'],
        case=res['case'],
        protect=res['protect'],
        seed=res['seed'],
        values=dict(res),
        path=path,
    )


def read_config(path):
    if not os.path.isfile(path):
        raise ErrorDeLectura(f'no existe el archivo de configuración {path}')
    with open(path, encoding='utf-8') as archivo:
        return parse_config(archivo.read(), path=path)


def _valor(v):
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, float):
        if math.isinf(v):
            raise ValueError('valor infinito en la configuración')
        return repr(v)
    return str(v)


def dump_config(run):
    """Texto que al volver a leerse produce un RunConfig idéntico."""
    lineas = ['# Configuración resuelta por paritysim']
    for clave in ORDEN:
        valor = run.values.get(clave)
        if valor is None:
            continue
        lineas.append(f'{clave} = {_valor(valor)}')
    return '\n'.join(lineas) + '\n'
