"""
Configuración del proyecto Paridad QED

Este archivo contiene toda la configuración del proyecto Django:

- Aplicaciones instaladas (Django REST Framework + app de simulación)
- Parámetros numéricos por defecto del simulador (diccionario PARITYSIM)
- Configuración de logging (salida por stderr para no ensuciar los CSV)
- Configuración de internacionalización

El proyecto está configurado para:
- Funcionar sin base de datos (todas las operaciones son cálculos puros)
- Ejecutarse desde la línea de comandos con `python manage.py paritysim ...`
- Leer algunos ajustes desde variables de entorno (PARITYSIM_THREADS,
  PARITYSIM_LOG_LEVEL)
"""

import os
from pathlib import Path

# ========== RUTAS DEL PROYECTO ==========
BASE_DIR = Path(__file__).resolve().parent.parent

# ========== CONFIGURACIÓN DE SEGURIDAD ==========
# El proyecto no sirve peticiones HTTP, pero Django exige una clave
SECRET_KEY = os.environ.get('PARITYSIM_SECRET_KEY', 'paritysim-solo-linea-de-comandos')
DEBUG = False
ALLOWED_HOSTS = []

# ========== APLICACIONES INSTALADAS ==========
INSTALLED_APPS = [
    # Django REST Framework para serializar reportes a JSON
    'rest_framework',

    # Aplicación principal del simulador
    'simulacion',
]

MIDDLEWARE = []

# ========== CONFIGURACIÓN DE BASE DE DATOS ==========
# Sin base de datos: los subcomandos solo escriben su archivo de salida
DATABASES = {}

# ========== INTERNACIONALIZACIÓN ==========
LANGUAGE_CODE = 'es'
TIME_ZONE = 'America/Asuncion'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ========== PARÁMETROS DEL SIMULADOR ==========
# Valores por defecto leídos a través de simulacion.conf.ajuste().
# Todas las tasas están en unidades de Gamma_1 (Gamma_1 = 1).
PARITYSIM = {
    'VALIDITY_THRESHOLD': 0.1,      # cota para el producto de débil excitación
    'CONSTRAINT_MARGIN': 10.0,      # margen M en |1 - r3 P F1 F2 sqrt(eta3)| > M/C
    'SINGULARITY_TOL': 1e-15,       # denominadores por debajo se consideran singulares
    'FOCK_CUTOFF': 32,              # corte inicial del espacio de Fock
    'FOCK_CUTOFF_MAX': 256,         # corte máximo tras duplicaciones automáticas
    'TAIL_TOL': 1e-8,               # población tolerada en el último nivel de Fock
    'DEFAULT_KAPPA': 1.0,           # decaimiento de cavidad por defecto
    'DEFAULT_TAU': 0.01,            # tiempo de ida y vuelta por defecto
    'HOMODYNE_DT_FRACTION': 1e-3,   # paso de la fotocorriente en unidades de t_m
    'THREADS': int(os.environ.get('PARITYSIM_THREADS', os.cpu_count() or 1)),
}

# ========== LOGGING ==========
# Todo el logging va a stderr; stdout queda reservado para CSV y reportes
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'simulacion': {
            'handlers': ['stderr'],
            'level': os.environ.get('PARITYSIM_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
