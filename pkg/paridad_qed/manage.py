#!/usr/bin/env python3
"""Utilidad de línea de comandos del proyecto Paridad QED.

Uso habitual: ``python manage.py paritysim <subcomando> --config ARCHIVO``.
"""
import os
import sys


def main():
    """Ejecuta los comandos de administración (incluido paritysim)."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'paridad_qed.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django. ¿Está instalado y disponible en "
            "PYTHONPATH? ¿Olvidó activar el entorno virtual?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
