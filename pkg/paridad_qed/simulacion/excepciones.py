"""
Excepciones del simulador.

Los errores de validación (parámetros, configuración, lectura de archivos)
heredan de ``django.core.exceptions.ValidationError`` y el comando los traduce
al código de salida 2. Los fallos numéricos heredan de ``ErrorNumerico`` y se
traducen al código 3.
"""

from django.core.exceptions import ValidationError


class ParametroInvalido(ValidationError):
    """Parámetro físico fuera de rango o resultado no finito."""


class ConfiguracionInvalida(ValidationError):
    """Combinación de opciones que el cálculo pedido no admite."""


class ErrorDeLectura(ValidationError):
    """Error en un archivo de configuración; recuerda la línea."""

    def __init__(self, mensaje, linea=None):
        self.linea = linea
        texto = f'línea {linea}: {mensaje}' if linea is not None else mensaje
        super().__init__(texto, code='lectura')


class RestriccionVacia(ValidationError):
    """No existe ningún r3 que cumpla la restricción de débil excitación."""


class MedicionDegenerada(ValidationError):
    """Las amplitudes condicionales no permiten distinguir los subespacios."""


class ErrorNumerico(ArithmeticError):
    """Base de los fallos numéricos."""


class Singularidad(ErrorNumerico):
    """Denominador casi nulo; ``estado`` indica el par (i1, i2) culpable."""

    def __init__(self, mensaje, estado=None):
        self.estado = estado
        super().__init__(mensaje)


class CorteInsuficiente(ErrorNumerico):
    """El corte del espacio de Fock no alcanza para el estado inicial."""


class ErrorDeIntegracion(ErrorNumerico):
    """La integración violó traza, hermiticidad o positividad."""
