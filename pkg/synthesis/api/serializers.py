from django.conf import settings
from rest_framework import serializers

from synthesis.benchmark import build_spec, parse_decimal
from synthesis.exceptions import FixedPointOverflow, SynthesisError
from synthesis.fixedpoint import FixedPointFormat, RoundingMode, quantize
from synthesis.models import SynthesisRun


# ─────────────────────────────────────────────
# Field types
# ─────────────────────────────────────────────

class ExactDecimalField(serializers.Field):
    """Decimal literal (string or JSON number) read as an exact Fraction."""
    default_error_messages = {
        'invalid': 'A decimal literal is required.',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (str, int, float)):
            self.fail('invalid')
        try:
            return parse_decimal(str(data))
        except ValueError:
            self.fail('invalid')

    def to_representation(self, value):
        return str(value)


class FormatField(serializers.Field):
    """'I,F' or [I, F]."""
    default_error_messages = {
        'invalid': 'Expected a fixed-point format "I,F".',
    }

    def to_internal_value(self, data):
        if isinstance(data, FixedPointFormat):
            return data
        try:
            if isinstance(data, (list, tuple)):
                return FixedPointFormat(int(data[0]), int(data[1]))
            return FixedPointFormat.parse(str(data))
        except (ValueError, TypeError, IndexError) as exc:
            raise serializers.ValidationError(str(exc) or self.error_messages['invalid'])

    def to_representation(self, value):
        return str(value)


class OrdersField(serializers.Field):
    """'M,N' or [M, N], both non-negative."""

    def to_internal_value(self, data):
        try:
            parts = data if isinstance(data, (list, tuple)) else str(data).split(',')
            m, n = (int(p) for p in parts)
        except (ValueError, TypeError):
            raise serializers.ValidationError('Expected controller orders "M,N".')
        if m < 0 or n < 0:
            raise serializers.ValidationError('Controller orders must be non-negative.')
        return m, n

    def to_representation(self, value):
        return list(value)


# ─────────────────────────────────────────────
# BENCHMARK Serializer
# ─────────────────────────────────────────────

class BenchmarkSerializer(serializers.Serializer):
    """
    Field-level validation of a benchmark; ``validated_data['spec']`` holds
    the resulting BenchmarkSpec (s-domain plants already discretized).
    """
    name = serializers.CharField(max_length=100, default='benchmark')
    domain = serializers.ChoiceField(choices=['s', 'z'], default='z')
    num = serializers.ListField(child=ExactDecimalField(), min_length=1)
    den = serializers.ListField(child=ExactDecimalField(), min_length=1)
    sample_time = ExactDecimalField(required=False, allow_null=True)
    delta = serializers.ListField(child=ExactDecimalField(), required=False)
    controller_format = FormatField()
    controller_orders = OrdersField()
    plant_format = FormatField(default=FixedPointFormat(16, 24))

    def validate_sample_time(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("Sample time must be positive.")
        return value

    def validate_delta(self, value):
        if any(d < 0 for d in value):
            raise serializers.ValidationError("Uncertainty magnitudes must be non-negative.")
        return value

    def validate(self, data):
        if all(c == 0 for c in data['den']):
            raise serializers.ValidationError({"den": "Denominator is identically zero."})
        num = list(data['num'])
        while len(num) > 1 and num[0] == 0:
            num.pop(0)
        den = list(data['den'])
        while den[0] == 0:
            den.pop(0)
        if len(num) > len(den):
            raise serializers.ValidationError({"num": "Plant must be proper (deg num <= deg den)."})

        if data['domain'] == 's' and data.get('sample_time') is None:
            raise serializers.ValidationError({"sample_time": "Required for an s-domain plant."})

        try:
            spec = build_spec(data)
        except SynthesisError as exc:
            raise serializers.ValidationError({"num": str(exc)})
        except ValueError as exc:
            raise serializers.ValidationError({"delta": str(exc)})

        expected = len(spec.plant.num.coeffs) + len(spec.plant.den.coeffs)
        if len(spec.delta) != expected:
            raise serializers.ValidationError(
                {"delta": f"Expected {expected} uncertainty magnitudes, got {len(spec.delta)}."})
        data['spec'] = spec
        return data


# ─────────────────────────────────────────────
# CONTROLLER Serializer
# ─────────────────────────────────────────────

class ControllerFileSerializer(serializers.Serializer):
    """
    Controller coefficients and their format. The rounding mode used to put
    them on the grid comes from ``context['rounding']`` (truncate by default).
    """
    num = serializers.ListField(child=ExactDecimalField(), min_length=1)
    den = serializers.ListField(child=ExactDecimalField(), min_length=1)
    format = FormatField()

    def validate(self, data):
        if data['den'][0] == 0:
            raise serializers.ValidationError({"den": "Leading denominator coefficient must be nonzero."})
        fmt = data['format']
        rounding = self.context.get('rounding', RoundingMode.TRUNCATE)
        too_large = []
        for c in data['num'] + data['den']:
            try:
                quantize(c, fmt, rounding)
            except FixedPointOverflow:
                too_large.append(str(c))
        if too_large:
            raise serializers.ValidationError(
                {"format": f"Coefficients {', '.join(too_large)} do not fit in {fmt}."})
        return data


# ─────────────────────────────────────────────
# REQUEST Serializers (API)
# ─────────────────────────────────────────────

class VerifyRequestSerializer(BenchmarkSerializer):
    """
    Used for POST /api/v1/verify/
    Body: benchmark fields + { controller: {num, den, format?}, rounding, steps }
    """
    controller = serializers.DictField()
    rounding = serializers.ChoiceField(choices=[m.value for m in RoundingMode], required=False)
    steps = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        data = super().validate(data)
        payload = dict(data['controller'])
        payload.setdefault('format', str(data['controller_format']))
        data.setdefault('rounding', settings.SYNTHESIS['ROUNDING'])
        controller = ControllerFileSerializer(data=payload, context={'rounding': data['rounding']})
        if not controller.is_valid():
            raise serializers.ValidationError({"controller": controller.errors})
        data['controller'] = controller.validated_data
        return data


class SynthesizeRequestSerializer(BenchmarkSerializer):
    """
    Used for POST /api/v1/synthesize/
    Body: benchmark fields + engine, seed and optional limits.
    """
    engine = serializers.ChoiceField(choices=['two', 'one'], default='two')
    seed = serializers.IntegerField(min_value=0, required=False)
    max_iterations = serializers.IntegerField(min_value=0, required=False)
    max_precision = FormatField(required=False)
    timeout = serializers.FloatField(min_value=0, required=False)
    search_budget = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        data = super().validate(data)
        data.setdefault('seed', settings.SYNTHESIS['SEED'])
        return data


# ─────────────────────────────────────────────
# RUN Serializer
# ─────────────────────────────────────────────

class SynthesisRunSerializer(serializers.ModelSerializer):
    succeeded = serializers.SerializerMethodField()

    class Meta:
        model = SynthesisRun
        fields = ['id', 'kind', 'benchmark', 'engine', 'seed', 'outcome', 'succeeded', 'report', 'created_at']
        read_only_fields = fields

    def get_succeeded(self, obj):
        return obj.succeeded
