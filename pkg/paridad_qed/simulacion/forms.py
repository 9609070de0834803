"""
Formulario de validación de archivos de configuración

Este archivo define ConfiguracionForm, que recibe el diccionario clave/valor
leído de un archivo `key = value` y valida:

- Tipos y rangos de cada parámetro (campos del formulario)
- Reglas de un campo (métodos clean_<campo>)
- Reglas entre campos: alpha/alpha2 excluyentes, caso inferido, fase por
  defecto, compatibilidad del backend, construcción del SystemConfig (clean)

Los valores sobre ambas cavidades (C, D, kappa, tau, Gamma, eta_cav) pueden
sobrescribirse por cavidad con los sufijos 1 y 2 (C1, D2, ...).
"""

import math

from django import forms
from django.core.exceptions import ValidationError

from .conf import ajuste
from .core import Backend, CavityQubitParams, LoopParams, SystemConfig

CASOS = [
    ('resonant', 'Resonante (D = 0, P = +1)'),
    ('nonresonant', 'No resonante (P = -1)'),
]

PROTEGER = [
    ('odd', 'Subespacio impar'),
    ('even', 'Subespacio par'),
]

# Parámetros de cavidad con posible sobrescritura por cavidad
CAVIDAD = ('C', 'D', 'kappa', 'tau', 'Gamma', 'eta_cav')


class ConfiguracionForm(forms.Form):
    """
    Valida una configuración de corrida.

    Después de is_valid(), cleaned_data['system'] contiene el SystemConfig y
    cleaned_data['resueltos'] el diccionario canónico de valores resueltos.
    """
    # Cavidades (valores comunes)
    C = forms.FloatField(required=False, min_value=0.0, label='Cooperatividad C')
    D = forms.FloatField(required=False, label='Desintonía reducida D = 2 Delta / Gamma')
    kappa = forms.FloatField(required=False, label='Decaimiento de cavidad kappa')
    tau = forms.FloatField(required=False, label='Tiempo de ida y vuelta tau')
    Gamma = forms.FloatField(required=False, label='Decaimiento atómico Gamma')
    eta_cav = forms.FloatField(required=False, label='Eficiencia intracavidad por vuelta')

    # Lazo
    r3 = forms.FloatField(required=False, min_value=0.0, label='Reflectividad del divisor r3')
    eta3 = forms.FloatField(required=False, label='Eficiencia del lazo eta3')
    psi = forms.FloatField(required=False, label='Fase del lazo psi (rad)')
    alpha = forms.FloatField(required=False, label='Amplitud de entrada alpha (real)')
    alpha2 = forms.FloatField(required=False, min_value=0.0, label='|alpha|^2')

    # Opciones
    case = forms.ChoiceField(choices=CASOS, required=False, label='Caso')
    protect = forms.ChoiceField(choices=PROTEGER, required=False, label='Subespacio protegido')
    backend = forms.ChoiceField(choices=Backend.choices, required=False, label='Backend')
    auto_detuning = forms.NullBooleanField(required=False, label='Desintonía automática de cavidad')
    validity_threshold = forms.FloatField(required=False, label='Cota de débil excitación')
    constraint_margin = forms.FloatField(required=False, label='Margen M de la restricción')
    seed = forms.IntegerField(required=False, min_value=0, label='Semilla')

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Sobrescrituras por cavidad: mismo tipo de campo con sufijo 1 o 2
        for nombre in CAVIDAD:
            for q in (1, 2):
                base = self.fields[nombre]
                self.fields[f'{nombre}{q}'] = forms.FloatField(
                    required=False,
                    min_value=base.min_value,
                    label=f'{base.label} (cavidad {q})',
                )

    @classmethod
    def claves(cls):
        return set(cls.base_fields) | {f'{n}{q}' for n in CAVIDAD for q in (1, 2)}

    def _positivo(self, nombre):
        valor = self.cleaned_data.get(nombre)
        if valor is not None and valor <= 0:
            raise ValidationError(f'{nombre} debe ser positivo.')
        return valor

    def _eficiencia(self, nombre):
        valor = self.cleaned_data.get(nombre)
        if valor is not None and not 0.0 < valor <= 1.0:
            raise ValidationError(f'{nombre} debe estar en (0, 1].')
        return valor

    def clean_r3(self):
        """Valida que el divisor no sea un espejo perfecto"""
        r3 = self.cleaned_data.get('r3')
        if r3 is not None and r3 >= 1.0:
            raise ValidationError(f'r3 debe estar en [0, 1) (r3={r3}).')
        return r3

    def clean_eta3(self):
        return self._eficiencia('eta3')

    def clean_eta_cav(self):
        return self._eficiencia('eta_cav')

    def clean_kappa(self):
        return self._positivo('kappa')

    def clean_tau(self):
        return self._positivo('tau')

    def clean_Gamma(self):
        return self._positivo('Gamma')

    def clean_validity_threshold(self):
        valor = self.cleaned_data.get('validity_threshold')
        if valor is not None and not 0.0 < valor < 1.0:
            raise ValidationError('validity_threshold debe estar en (0, 1).')
        return valor

    def clean_constraint_margin(self):
        valor = self.cleaned_data.get('constraint_margin')
        if valor is not None and valor < 1.0:
            raise ValidationError('constraint_margin debe ser >= 1.')
        return valor

    def _por_cavidad(self, datos, nombre, q, defecto):
        valor = datos.get(f'{nombre}{q}')
        if valor is None:
            valor = datos.get(nombre)
        return defecto if valor is None else valor

    def clean(self):
        """Resuelve valores por defecto y construye el SystemConfig"""
        datos = super().clean()
        if self.errors:
            return datos

        for q in (1, 2):
            for nombre in ('kappa', 'tau', 'Gamma'):
                valor = datos.get(f'{nombre}{q}')
                if valor is not None and valor <= 0:
                    raise ValidationError(f'{nombre}{q} debe ser positivo.')
            valor = datos.get(f'eta_cav{q}')
            if valor is not None and not 0.0 < valor <= 1.0:
                raise ValidationError(f'eta_cav{q} debe estar en (0, 1].')

        if datos.get('alpha') is not None and datos.get('alpha2') is not None:
            raise ValidationError('alpha y alpha2 son excluyentes.')

        res = {}
        for q in (1, 2):
            C = self._por_cavidad(datos, 'C', q, None)
            if C is None:
                raise ValidationError(f'Falta la cooperatividad de la cavidad {q} (C o C{q}).')
            res[f'C{q}'] = C
            res[f'D{q}'] = self._por_cavidad(datos, 'D', q, 0.0)
            res[f'kappa{q}'] = self._por_cavidad(datos, 'kappa', q, ajuste('DEFAULT_KAPPA'))
            res[f'tau{q}'] = self._por_cavidad(datos, 'tau', q, ajuste('DEFAULT_TAU'))
            res[f'Gamma{q}'] = self._por_cavidad(datos, 'Gamma', q, 1.0)
            res[f'eta_cav{q}'] = self._por_cavidad(datos, 'eta_cav', q, 1.0)

        resonante = res['D1'] == 0 and res['D2'] == 0
        caso = datos.get('case') or ('resonant' if resonante else 'nonresonant')
        if caso == 'resonant' and not resonante:
            raise ValidationError('case = resonant requiere D = 0 en ambas cavidades.')
        proteger = datos.get('protect') or 'odd'

        psi = datos.get('psi')
        if psi is None:
            psi = 0.0 if caso == 'resonant' else math.pi
            if proteger == 'even':
                psi = (psi + math.pi) % (2.0 * math.pi)

        if datos.get('alpha2') is not None:
            alpha = math.sqrt(datos['alpha2'])
        else:
            alpha = datos.get('alpha') if datos.get('alpha') is not None else 1.0

        auto = datos.get('auto_detuning')
        res.update({
            'r3': datos.get('r3') if datos.get('r3') is not None else 0.0,
            'eta3': datos.get('eta3') if datos.get('eta3') is not None else 1.0,
            'psi': psi,
            'alpha': alpha,
            'case': caso,
            'protect': proteger,
            'backend': datos.get('backend') or Backend.HIGH_FINESSE_FIRST_ORDER.value,
            'auto_detuning': True if auto is None else auto,
            'validity_threshold': datos.get('validity_threshold') or ajuste('VALIDITY_THRESHOLD'),
            'constraint_margin': datos.get('constraint_margin') or ajuste('CONSTRAINT_MARGIN'),
            'seed': datos.get('seed'),
        })

        try:
            datos['system'] = construir_sistema(res)
        except ValidationError as e:
            raise ValidationError(e.messages)
        datos['resueltos'] = res
        return datos


def construir_sistema(res):
    """SystemConfig a partir del diccionario de valores resueltos."""
    cavidades = [
        CavityQubitParams.from_dimensionless(
            res[f'C{q}'], res[f'D{q}'],
            kappa=res[f'kappa{q}'], tau=res[f'tau{q}'], Gamma=res[f'Gamma{q}'],
            eta_cav=res[f'eta_cav{q}'], auto_detuning=res['auto_detuning'],
        )
        for q in (1, 2)
    ]
    return SystemConfig(
        cavity1=cavidades[0],
        cavity2=cavidades[1],
        loop=LoopParams.from_reflectivity(res['r3'], eta3=res['eta3'], psi=res['psi'], alpha=res['alpha']),
        backend=res['backend'],
        validity_threshold=res['validity_threshold'],
        constraint_margin=res['constraint_margin'],
    )
