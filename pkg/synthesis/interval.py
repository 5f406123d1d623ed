"""
Interval arithmetic over exact rationals.

Endpoints are ``Fraction`` values so every operation returns the exact hull
of the result set; outward rounding only happens when an interval is pushed
onto a dyadic grid (``RationalInterval.outward``).
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import DivisorContainsZero
from .fixedpoint import to_fraction


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'lo', to_fraction(self.lo))
        object.__setattr__(self, 'hi', to_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x):
        x = to_fraction(x)
        return cls(x, x)

    @classmethod
    def around(cls, center, radius):
        center, radius = to_fraction(center), to_fraction(radius)
        return cls(center - radius, center + radius)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def is_point(self):
        return self.lo == self.hi

    def contains(self, x):
        return self.lo <= to_fraction(x) <= self.hi

    def contains_zero(self):
        return self.lo <= 0 <= self.hi

    def subset_of(self, other):
        return other.lo <= self.lo and self.hi <= other.hi

    def split(self):
        m = self.mid
        return RationalInterval(self.lo, m), RationalInterval(m, self.hi)

    def outward(self, fmt):
        """Smallest interval with endpoints on the 2**-F grid that contains self."""
        scale = fmt.scale
        return RationalInterval(Fraction(math.floor(self.lo * scale), scale),
                                Fraction(math.ceil(self.hi * scale), scale))

    def positive(self):
        return self.lo > 0

    def nonpositive(self):
        return self.hi <= 0

    def __add__(self, other):
        return iv_add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _lift(other))

    def __rsub__(self, other):
        return iv_sub(_lift(other), self)

    def __mul__(self, other):
        return iv_mul(self, _lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, _lift(other))

    def __neg__(self):
        return iv_neg(self)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def _lift(x):
    return x if isinstance(x, RationalInterval) else RationalInterval.point(x)


def iv_add(a, b):
    return RationalInterval(a.lo + b.lo, a.hi + b.hi)


def iv_sub(a, b):
    return RationalInterval(a.lo - b.hi, a.hi - b.lo)


def iv_neg(a):
    return RationalInterval(-a.hi, -a.lo)


def iv_mul(a, b):
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return RationalInterval(min(products), max(products))


def iv_div(a, b):
    if b.contains_zero():
        raise DivisorContainsZero(f"divisor {b} contains 0")
    return iv_mul(a, RationalInterval(1 / b.hi, 1 / b.lo))


def iv_abs(a):
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return iv_neg(a)
    return RationalInterval(0, max(-a.lo, a.hi))


# ─────────────────────────────────────────────
# Interval polynomials (descending powers of z)
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class IntervalPoly:
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(_lift(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("IntervalPoly needs at least one coefficient")
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def from_points(cls, values):
        return cls(tuple(RationalInterval.point(v) for v in values))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def contains_poly(self, values):
        values = list(values)
        pad = len(self.coeffs) - len(values)
        if pad < 0:
            return False
        values = [0] * pad + values
        return all(c.contains(v) for c, v in zip(self.coeffs, values))


def interval_poly_add(p, q):
    n = max(len(p.coeffs), len(q.coeffs))
    zero = RationalInterval.point(0)
    a = (zero,) * (n - len(p.coeffs)) + p.coeffs
    b = (zero,) * (n - len(q.coeffs)) + q.coeffs
    return IntervalPoly(tuple(iv_add(x, y) for x, y in zip(a, b)))


def interval_poly_mul(p, q):
    out = [RationalInterval.point(0)] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, x in enumerate(p.coeffs):
        for j, y in enumerate(q.coeffs):
            out[i + j] = iv_add(out[i + j], iv_mul(x, y))
    return IntervalPoly(tuple(out))


def interval_poly_eval(p, x):
    x = _lift(x)
    acc = RationalInterval.point(0)
    for c in p.coeffs:
        acc = iv_add(iv_mul(acc, x), c)
    return acc


def coefficient_interval(c, delta, fmt=None):
    """[c - dp - 2^-Fp, c + dp + 2^-Fp]; fmt=None means no grid term."""
    radius = to_fraction(delta)
    if fmt is not None:
        radius += fmt.step
    return RationalInterval.around(c, radius)


def family_to_interval_poly(family, inflate=True):
    """
    Interval numerator/denominator enclosing every plant of the family.

    With ``inflate`` each coefficient also absorbs the plant grid error
    2**-Fp (the sound enclosure); without it only the Δp box is returned.
    """
    fmt = family.plant_format if inflate else None
    num = family.nominal.num.coeffs
    den = family.nominal.den.coeffs
    d_num, d_den = family.delta[:len(num)], family.delta[len(num):]
    return (IntervalPoly(tuple(coefficient_interval(c, d, fmt) for c, d in zip(num, d_num))),
            IntervalPoly(tuple(coefficient_interval(c, d, fmt) for c, d in zip(den, d_den))))
