import math

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer


class NumeroField(serializers.Field):
    """Real; los valores no finitos se emiten como null."""

    def to_representation(self, value):
        if value is None:
            return None
        value = float(value)
        return value if math.isfinite(value) else None


class ComplejoField(serializers.Field):
    """Complejo como par [re, im]."""

    def to_representation(self, value):
        z = complex(value)
        return [z.real, z.imag]


class ParNumerosField(serializers.Field):
    def to_representation(self, value):
        return [NumeroField().to_representation(v) for v in value]


# serializers de core y decoherence

class ValidityEntrySerializer(serializers.Serializer):
    cavity = serializers.IntegerField()
    partner_state = serializers.IntegerField()
    photon_factor = NumeroField()
    atom_factor = NumeroField()
    loop_factor = NumeroField()
    product = NumeroField()
    passes = serializers.BooleanField()
    loop_denominator = NumeroField()
    constraint_bound = NumeroField()
    constraint_ok = serializers.BooleanField()


class ValidityReportSerializer(serializers.Serializer):
    threshold = NumeroField()
    margin = NumeroField()
    passes = serializers.BooleanField()
    constraint_ok = serializers.BooleanField()
    max_product = NumeroField()
    entries = ValidityEntrySerializer(many=True)


class DecoherenceReportSerializer(serializers.Serializer):
    t_m = NumeroField()
    t_m00 = NumeroField()
    t_m11 = NumeroField()
    nu_odd_se_1 = NumeroField()
    nu_odd_se_2 = NumeroField()
    nu_even_se_1 = NumeroField()
    nu_even_se_2 = NumeroField()
    nu_odd_loss = NumeroField()
    nu_even_loss = NumeroField()
    nu_cav_loss_odd = ParNumerosField()
    nu_cav_loss_even = ParNumerosField()
    odd_se_products = ParNumerosField()
    even_se_products = ParNumerosField()
    odd_loss_norm = NumeroField()
    even_loss_norm = NumeroField()
    odd_exponent = serializers.SerializerMethodField()
    even_exponent = serializers.SerializerMethodField()
    loop_importance = NumeroField()
    cavity_importance = ParNumerosField()
    avisos = serializers.ListField(child=serializers.CharField())

    def get_odd_exponent(self, obj):
        return NumeroField().to_representation(obj.exponent('odd'))

    def get_even_exponent(self, obj):
        return NumeroField().to_representation(obj.exponent('even'))


class AmplitudeSetSerializer(serializers.Serializer):
    zeta1 = ComplejoField()
    zeta2 = ComplejoField()
    zeta3 = ComplejoField()
    zeta4 = ComplejoField()
    zeta5 = ComplejoField()
    xi1 = ComplejoField()
    xi2 = ComplejoField()
    beta = ComplejoField()


# serializers de optimizer, lindblad y homodyne

class R3ResultSerializer(serializers.Serializer):
    r3 = NumeroField()
    value = NumeroField()
    constraint_active = serializers.BooleanField()
    r_max = NumeroField()
    unimodal = serializers.BooleanField()


class EliminationReportSerializer(serializers.Serializer):
    condition_ratio = NumeroField()
    field_deviation = NumeroField()
    population_deviation = NumeroField()
    purity_deviation = NumeroField()
    max_excited = NumeroField()
    cutoff = serializers.IntegerField()
    steps = serializers.IntegerField()


class DiscriminationResultSerializer(serializers.Serializer):
    error_rate = NumeroField()
    expected_error_rate = NumeroField()
    standard_error = NumeroField()
    n_traj = serializers.IntegerField()
    errors = serializers.IntegerField()
    t_m = NumeroField()
    horizon = NumeroField()
    n_steps = serializers.IntegerField()


def a_json(serializer_class, instancia, **extra):
    """Serializa y renderiza a texto JSON (UTF-8)."""
    datos = dict(serializer_class(instancia).data)
    datos.update(extra)
    return JSONRenderer().render(datos, renderer_context={'indent': 2}).decode('utf-8')
