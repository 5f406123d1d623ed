"""
Benchmark and controller files.

Both are line-oriented ``key = value`` text with ``#`` comments. List
values are comma separated. Numbers are decimal literals and are read
exactly; a binary float never sits between the file and the rationals.

    # cruise control, z-domain
    name = cruise_control
    domain = z
    num = 0.0264
    den = 1, -0.9998
    controller_format = 4,16
    controller_orders = 2,2
"""
import logging
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .discretize import ContinuousTF, zoh_discretize
from .exceptions import BenchmarkParseError
from .fixedpoint import FixedPointFormat, RoundingMode, quantize
from .transfer import Controller, PlantFamily, Poly, TransferFunction

logger = logging.getLogger(__name__)

DECIMAL_RE = re.compile(r'[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?')

BENCHMARK_KEYS = ('name', 'domain', 'num', 'den', 'sample_time', 'delta', 'controller_format',
                  'controller_orders', 'plant_format')
CONTROLLER_KEYS = ('num', 'den', 'format')
LIST_KEYS = ('num', 'den', 'delta')


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    domain: str
    plant: TransferFunction
    delta: tuple
    controller_format: FixedPointFormat
    controller_orders: tuple
    plant_format: FixedPointFormat
    sample_time: Fraction = None
    continuous: ContinuousTF = None

    @property
    def family(self):
        return PlantFamily(self.plant, self.delta, self.plant_format)

    def as_dict(self):
        return {
            'name': self.name,
            'domain': self.domain,
            'num': [str(c) for c in self.plant.num.coeffs],
            'den': [str(c) for c in self.plant.den.coeffs],
            'sample_time': None if self.sample_time is None else str(self.sample_time),
            'delta': [str(d) for d in self.delta],
            'controller_format': str(self.controller_format),
            'controller_orders': list(self.controller_orders),
            'plant_format': str(self.plant_format),
        }


def parse_decimal(token):
    """Exact rational of a decimal literal; accepts the unicode minus sign."""
    text = token.strip().replace('−', '-')
    if not DECIMAL_RE.fullmatch(text):
        raise ValueError(f"not a decimal literal: {token.strip()!r}")
    return Fraction(Decimal(text))


def parse_key_values(text, allowed):
    """
    ``key = value`` lines into a dict of raw strings (lists for LIST_KEYS).

    Raises BenchmarkParseError with the 1-based line and column of the
    offending token.
    """
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0]
        if not line.strip():
            continue
        if '=' not in line:
            column = len(line) - len(line.lstrip()) + 1
            raise BenchmarkParseError("expected 'key = value'", lineno, column)
        key_part, value_part = line.split('=', 1)
        key = key_part.strip()
        key_column = len(key_part) - len(key_part.lstrip()) + 1
        if key not in allowed:
            raise BenchmarkParseError(f"unknown key {key!r}", lineno, key_column)
        if key in values:
            raise BenchmarkParseError(f"duplicate key {key!r}", lineno, key_column)
        value_column = len(key_part) + 2
        if not value_part.strip():
            raise BenchmarkParseError(f"missing value for {key!r}", lineno, value_column)
        if key in LIST_KEYS:
            items, offset = [], value_column
            for token in value_part.split(','):
                if not token.strip():
                    raise BenchmarkParseError("empty list item", lineno, offset)
                column = offset + len(token) - len(token.lstrip())
                try:
                    parse_decimal(token)
                except ValueError as exc:
                    raise BenchmarkParseError(str(exc), lineno, column) from None
                items.append(token.strip().replace('−', '-'))
                offset += len(token) + 1
            values[key] = items
        else:
            values[key] = value_part.strip()
    return values


def _read(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise BenchmarkParseError(f"cannot read {path}: {exc.strerror}") from None


def build_spec(data):
    """BenchmarkSpec from validated field values; s-domain plants are discretized here."""
    continuous = None
    num, den = Poly(tuple(data['num'])), Poly(tuple(data['den']))
    if data['domain'] == 's':
        continuous = ContinuousTF(num, den, data['sample_time'])
        plant = zoh_discretize(continuous).normalize()
    else:
        plant = TransferFunction(num, den)
    delta = data.get('delta') or (Fraction(0),) * (len(plant.num.coeffs) + len(plant.den.coeffs))
    return BenchmarkSpec(
        name=data['name'],
        domain=data['domain'],
        plant=plant,
        delta=tuple(delta),
        controller_format=data['controller_format'],
        controller_orders=tuple(data['controller_orders']),
        plant_format=data['plant_format'],
        sample_time=data.get('sample_time'),
        continuous=continuous,
    )


def parse_benchmark(path):
    from rest_framework import serializers

    from .api.serializers import BenchmarkSerializer

    values = parse_key_values(_read(path), BENCHMARK_KEYS)
    serializer = BenchmarkSerializer(data=values)
    if not serializer.is_valid():
        raise serializers.ValidationError(serializer.errors)
    spec = serializer.validated_data['spec']
    logger.info("loaded benchmark %s (%s-domain, plant %s)", spec.name, spec.domain, spec.plant)
    return spec


def controller_from_values(num, den, fmt, rounding=RoundingMode.TRUNCATE):
    """Quantize decimal coefficients onto ``fmt``; inexact ones are logged."""
    inexact = [str(c) for c in list(num) + list(den) if quantize(c, fmt, rounding).value != c]
    if inexact:
        logger.info("controller coefficients %s are not representable in %s, %s applied",
                    ", ".join(inexact), fmt, RoundingMode(rounding).value)
    return Controller.from_values(num, den, fmt, rounding)


def parse_controller(path, rounding=RoundingMode.TRUNCATE, default_format=None):
    from rest_framework import serializers

    from .api.serializers import ControllerFileSerializer

    values = parse_key_values(_read(path), CONTROLLER_KEYS)
    if 'format' not in values and default_format is not None:
        values['format'] = f"{default_format.integer_bits},{default_format.fraction_bits}"
    serializer = ControllerFileSerializer(data=values, context={'rounding': rounding})
    if not serializer.is_valid():
        raise serializers.ValidationError(serializer.errors)
    data = serializer.validated_data
    return controller_from_values(data['num'], data['den'], data['format'], rounding)
