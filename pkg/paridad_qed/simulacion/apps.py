from django.apps import AppConfig


class SimulacionConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'simulacion'
    verbose_name = 'Simulación de medición de paridad'
