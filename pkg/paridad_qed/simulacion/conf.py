"""
Acceso a los parámetros por defecto del simulador.

Los módulos numéricos leen sus constantes a través de ``ajuste()`` para que
puedan importarse y usarse también sin un proyecto Django configurado.
"""

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

# Deben coincidir con settings.PARITYSIM
POR_DEFECTO = {
    'VALIDITY_THRESHOLD': 0.1,
    'CONSTRAINT_MARGIN': 10.0,
    'SINGULARITY_TOL': 1e-15,
    'FOCK_CUTOFF': 32,
    'FOCK_CUTOFF_MAX': 256,
    'TAIL_TOL': 1e-8,
    'DEFAULT_KAPPA': 1.0,
    'DEFAULT_TAU': 0.01,
    'HOMODYNE_DT_FRACTION': 1e-3,
    'THREADS': 1,
}


def ajuste(nombre):
    """Devuelve settings.PARITYSIM[nombre] o el valor por defecto."""
    try:
        valores = getattr(settings, 'PARITYSIM', {})
    except ImproperlyConfigured:
        valores = {}
    return valores.get(nombre, POR_DEFECTO[nombre])
