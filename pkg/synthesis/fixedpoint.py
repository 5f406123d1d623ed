"""
Exact fixed-point arithmetic in a format <I,F>.

A value is a scaled integer: ``raw * 2**-F``. Nothing here ever touches a
binary float, every result is computed exactly and then brought back onto
the grid by truncation toward zero (or nearest, ties away from zero, when
quantizing an external constant).
"""
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from functools import total_ordering

from .exceptions import FixedPointDivisionByZero, FixedPointOverflow

MAX_WORD_BITS = 64


class RoundingMode(str, Enum):
    TRUNCATE = 'truncate'
    NEAREST = 'nearest'


def to_fraction(x):
    """Exact rational view of ints, Fractions, Decimals and decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, FixedPointValue):
        return x.value
    if isinstance(x, (int, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(Decimal(x.strip()))
    # floats are accepted but taken at their exact binary value
    return Fraction(x)


@dataclass(frozen=True)
class FixedPointFormat:
    integer_bits: int
    fraction_bits: int

    def __post_init__(self):
        if self.integer_bits < 1:
            raise ValueError("integer_bits must be >= 1")
        if self.fraction_bits < 0:
            raise ValueError("fraction_bits must be >= 0")
        if self.integer_bits + self.fraction_bits > MAX_WORD_BITS:
            raise ValueError(f"I + F must not exceed {MAX_WORD_BITS} bits")

    @classmethod
    def parse(cls, text):
        """'4,16' or '<4,16>' -> FixedPointFormat(4, 16)."""
        cleaned = text.strip().strip('<>⟨⟩() ')
        parts = [p.strip() for p in cleaned.split(',')]
        if len(parts) != 2:
            raise ValueError(f"expected 'I,F', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @property
    def scale(self):
        return 1 << self.fraction_bits

    @property
    def step(self):
        return Fraction(1, self.scale)

    @property
    def bound(self):
        return Fraction(1 << self.integer_bits)

    @property
    def max_raw(self):
        # exclusive bound on |raw|
        return 1 << (self.integer_bits + self.fraction_bits)

    def contains(self, x):
        return abs(to_fraction(x)) < self.bound

    def widen(self, extra_integer, extra_fraction):
        return FixedPointFormat(self.integer_bits + extra_integer,
                                self.fraction_bits + extra_fraction)

    def covers(self, other):
        return (self.integer_bits >= other.integer_bits
                and self.fraction_bits >= other.fraction_bits)

    def __str__(self):
        return f"<{self.integer_bits},{self.fraction_bits}>"


@total_ordering
@dataclass(frozen=True)
class FixedPointValue:
    raw: int
    format: FixedPointFormat

    def __post_init__(self):
        if abs(self.raw) >= self.format.max_raw:
            raise FixedPointOverflow(
                f"raw value {self.raw} does not fit in {self.format}")

    @classmethod
    def zero(cls, fmt):
        return cls(0, fmt)

    @property
    def value(self):
        return Fraction(self.raw, self.format.scale)

    def is_zero(self):
        return self.raw == 0

    def lift(self, fmt):
        """Re-embed exactly into a format with at least as many bits."""
        if fmt == self.format:
            return self
        if fmt.fraction_bits < self.format.fraction_bits:
            return quantize_truncate(self.value, fmt)
        return FixedPointValue(self.raw << (fmt.fraction_bits - self.format.fraction_bits), fmt)

    def to_decimal(self):
        """Exact decimal rendering; the grid is dyadic so it always terminates."""
        f = self.format.fraction_bits
        sign = '-' if self.raw < 0 else ''
        if f == 0:
            return f"{sign}{abs(self.raw)}"
        digits = str(abs(self.raw) * 5 ** f).rjust(f + 1, '0')
        whole, frac = digits[:-f], digits[-f:].rstrip('0')
        return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"

    def __neg__(self):
        return FixedPointValue(-self.raw, self.format)

    def __add__(self, other):
        return fp_add(self, other)

    def __sub__(self, other):
        return fp_sub(self, other)

    def __mul__(self, other):
        return fp_mul(self, other)

    def __truediv__(self, other):
        return fp_div(self, other)

    def __lt__(self, other):
        return self.value < to_fraction(other)

    def __eq__(self, other):
        if isinstance(other, FixedPointValue):
            return self.value == other.value
        if isinstance(other, (int, Fraction, Decimal)):
            return self.value == to_fraction(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return self.to_decimal()


# ─────────────────────────────────────────────
# Quantizers
# ─────────────────────────────────────────────

def _checked(raw, fmt):
    if abs(raw) >= fmt.max_raw:
        raise FixedPointOverflow(f"{Fraction(raw, fmt.scale)} overflows {fmt}")
    return FixedPointValue(raw, fmt)


def quantize_truncate(x, fmt):
    scaled = to_fraction(x) * fmt.scale
    # int() on a Fraction truncates toward zero
    return _checked(int(scaled), fmt)


def quantize_nearest(x, fmt):
    scaled = to_fraction(x) * fmt.scale
    magnitude = int(abs(scaled) + Fraction(1, 2))
    return _checked(-magnitude if scaled < 0 else magnitude, fmt)


def quantize(x, fmt, mode=RoundingMode.TRUNCATE):
    if RoundingMode(mode) is RoundingMode.NEAREST:
        return quantize_nearest(x, fmt)
    return quantize_truncate(x, fmt)


def quantize_poly(coeffs, fmt, mode=RoundingMode.TRUNCATE):
    return [quantize(c, fmt, mode) for c in coeffs]


def grid_values(fmt):
    """Every representable value of a (small) format, ascending."""
    top = fmt.max_raw
    return [FixedPointValue(r, fmt) for r in range(-top + 1, top)]


# ─────────────────────────────────────────────
# Arithmetic: exact intermediate, truncated result
# ─────────────────────────────────────────────

def _same_format(a, b):
    if a.format != b.format:
        raise ValueError(f"format mismatch: {a.format} vs {b.format}")
    return a.format


def fp_add(a, b):
    fmt = _same_format(a, b)
    return _checked(a.raw + b.raw, fmt)


def fp_sub(a, b):
    fmt = _same_format(a, b)
    return _checked(a.raw - b.raw, fmt)


def fp_mul(a, b):
    fmt = _same_format(a, b)
    return _checked(int(Fraction(a.raw * b.raw, fmt.scale)), fmt)


def fp_div(a, b):
    fmt = _same_format(a, b)
    if b.raw == 0:
        raise FixedPointDivisionByZero("fixed-point division by zero")
    return _checked(int(Fraction(a.raw * fmt.scale, b.raw)), fmt)
