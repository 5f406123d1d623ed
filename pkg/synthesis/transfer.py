"""
Polynomials and transfer functions in z.

Every polynomial is stored in descending powers of z (index 0 is the
highest power). Coefficients are exact ``Fraction`` values; z^-1 forms are
converted once, where they are parsed.
"""
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import DegenerateCharPoly
from .fixedpoint import FixedPointValue, RoundingMode, quantize, quantize_poly, to_fraction
from .interval import (IntervalPoly, RationalInterval, family_to_interval_poly, interval_poly_add,
                       interval_poly_mul)

DEFAULT_CANCELLATION_TOL = 1e-6


@dataclass(frozen=True)
class Poly:
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(to_fraction(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("Poly needs at least one coefficient")
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def zero(cls):
        return cls((Fraction(0),))

    def normalize(self):
        coeffs = self.coeffs
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs = coeffs[1:]
        return Poly(coeffs)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    @property
    def degree(self):
        return len(self.normalize().coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[0]

    def evaluate(self, z):
        exact = isinstance(z, (int, Fraction))
        acc = 0
        for c in self.coeffs:
            acc = acc * z + (c if exact else float(c))
        return acc

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_sub(self, other)

    def __mul__(self, other):
        return poly_mul(self, other)

    def __str__(self):
        n = len(self.coeffs) - 1
        terms = []
        for i, c in enumerate(self.coeffs):
            power = n - i
            terms.append(f"{c}" + (f"z^{power}" if power > 1 else "z" if power == 1 else ""))
        return " + ".join(terms)


def _align(a, b):
    n = max(len(a), len(b))
    zero = Fraction(0)
    return (zero,) * (n - len(a)) + tuple(a), (zero,) * (n - len(b)) + tuple(b)


def poly_add(a, b):
    x, y = _align(a.coeffs, b.coeffs)
    return Poly(tuple(p + q for p, q in zip(x, y)))


def poly_sub(a, b):
    x, y = _align(a.coeffs, b.coeffs)
    return Poly(tuple(p - q for p, q in zip(x, y)))


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return Poly(tuple(out))


# ─────────────────────────────────────────────
# Transfer functions
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class TransferFunction:
    num: Poly
    den: Poly

    def __post_init__(self):
        if not isinstance(self.num, Poly):
            object.__setattr__(self, 'num', Poly(tuple(self.num)))
        if not isinstance(self.den, Poly):
            object.__setattr__(self, 'den', Poly(tuple(self.den)))
        if self.den.is_zero():
            raise ValueError("transfer function denominator is identically zero")

    @classmethod
    def from_coeffs(cls, num, den):
        return cls(Poly(tuple(num)), Poly(tuple(den)))

    def normalize(self):
        return TransferFunction(self.num.normalize(), self.den.normalize())

    @property
    def order(self):
        n = self.normalize()
        return n.num.degree, n.den.degree

    def is_proper(self):
        m, n = self.order
        return n >= m

    def evaluate(self, z):
        return self.num.evaluate(z) / self.den.evaluate(z)

    def poles(self):
        return np.roots([float(c) for c in self.den.normalize().coeffs])

    def zeros(self):
        num = self.num.normalize()
        if num.is_zero():
            return np.array([])
        return np.roots([float(c) for c in num.coeffs])

    def __str__(self):
        return f"({self.num}) / ({self.den})"


def pack_coefficients(tf):
    """[n_0 .. n_M d_0 .. d_N] of a transfer function."""
    return tuple(tf.num.coeffs) + tuple(tf.den.coeffs)


def unpack_coefficients(vector, num_length):
    vector = tuple(vector)
    return TransferFunction(Poly(vector[:num_length]), Poly(vector[num_length:]))


@dataclass(frozen=True)
class PlantFamily:
    """Nominal plant, absolute per-coefficient uncertainty and plant grid <Ip,Fp>."""
    nominal: TransferFunction
    delta: tuple
    plant_format: object = None

    def __post_init__(self):
        delta = tuple(to_fraction(d) for d in self.delta)
        expected = len(self.nominal.num.coeffs) + len(self.nominal.den.coeffs)
        if len(delta) != expected:
            raise ValueError(f"uncertainty vector has {len(delta)} entries, expected {expected}")
        if any(d < 0 for d in delta):
            raise ValueError("uncertainty magnitudes must be non-negative")
        object.__setattr__(self, 'delta', delta)

    @classmethod
    def point(cls, nominal, plant_format=None):
        size = len(nominal.num.coeffs) + len(nominal.den.coeffs)
        return cls(nominal, (0,) * size, plant_format)

    @property
    def num_length(self):
        return len(self.nominal.num.coeffs)

    def with_format(self, plant_format):
        return PlantFamily(self.nominal, self.delta, plant_format)

    def box(self, inflate=False):
        """Per-coefficient intervals, numerator first."""
        num, den = family_to_interval_poly(self, inflate=inflate)
        return num.coeffs + den.coeffs

    def grid_box(self):
        """
        Δp box with endpoints snapped inward onto <Ip,Fp> (the uncertainty-stage box).

        A coefficient whose interval holds no grid point collapses to the grid
        point nearest its midpoint.
        """
        scale = self.plant_format.scale
        out = []
        for iv in self.box(inflate=False):
            lo, hi = math.ceil(iv.lo * scale), math.floor(iv.hi * scale)
            if lo > hi:
                point = quantize(iv.mid, self.plant_format, RoundingMode.NEAREST).value
                out.append(RationalInterval.point(point))
            else:
                out.append(RationalInterval(Fraction(lo, scale), Fraction(hi, scale)))
        return tuple(out)

    def plant_from_vector(self, vector):
        return unpack_coefficients(vector, self.num_length)

    def vertices(self, box=None):
        box = box if box is not None else self.box(inflate=False)
        choices = [(iv.lo,) if iv.is_point() else (iv.lo, iv.hi) for iv in box]
        for corner in itertools.product(*choices):
            yield self.plant_from_vector(corner)

    def contains(self, plant, inflate=True):
        box = self.box(inflate=inflate)
        vector = pack_coefficients(plant)
        return len(vector) == len(box) and all(iv.contains(v) for iv, v in zip(box, vector))


@dataclass(frozen=True)
class Controller:
    num: tuple
    den: tuple
    format: object = field(default=None)

    def __post_init__(self):
        num, den = tuple(self.num), tuple(self.den)
        fmt = self.format or (num + den)[0].format
        for c in num + den:
            if not isinstance(c, FixedPointValue) or c.format != fmt:
                raise ValueError(f"controller coefficients must be fixed-point values in {fmt}")
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)
        object.__setattr__(self, 'format', fmt)

    @classmethod
    def zero(cls, orders, fmt):
        m, n = orders
        return cls((FixedPointValue.zero(fmt),) * (m + 1), (FixedPointValue.zero(fmt),) * (n + 1), fmt)

    @classmethod
    def from_values(cls, num, den, fmt, mode=RoundingMode.TRUNCATE):
        return cls(tuple(quantize_poly(num, fmt, mode)), tuple(quantize_poly(den, fmt, mode)), fmt)

    @property
    def orders(self):
        return len(self.num) - 1, len(self.den) - 1

    @property
    def coefficients(self):
        return self.num + self.den

    def with_coefficients(self, coeffs):
        coeffs = tuple(coeffs)
        return Controller(coeffs[:len(self.num)], coeffs[len(self.num):], self.format)

    def is_zero(self):
        return all(c.is_zero() for c in self.coefficients)

    @property
    def num_poly(self):
        return Poly(tuple(c.value for c in self.num))

    @property
    def den_poly(self):
        return Poly(tuple(c.value for c in self.den))

    def as_transfer_function(self):
        return TransferFunction(self.num_poly, self.den_poly)

    def __str__(self):
        num = ", ".join(c.to_decimal() for c in self.num)
        den = ", ".join(c.to_decimal() for c in self.den)
        return f"[{num}] / [{den}] {self.format}"


# ─────────────────────────────────────────────
# Closed loop
# ─────────────────────────────────────────────

def _fixed_poly_mul(a, b):
    fmt = a[0].format
    out = [FixedPointValue.zero(fmt)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _fixed_poly_add(a, b):
    fmt = a[0].format
    zero = FixedPointValue.zero(fmt)
    n = max(len(a), len(b))
    a = [zero] * (n - len(a)) + list(a)
    b = [zero] * (n - len(b)) + list(b)
    return [x + y for x, y in zip(a, b)]


def char_poly(controller, plant, plant_format=None):
    """
    S(z) = Cn·Gn + Cd·Gd.

    Exact rationals by default. Given ``plant_format`` the products are formed
    in <Ip,Fp> fixed point with truncation (the fast, possibly unsound path).
    """
    plant = plant.normalize()
    if plant_format is None:
        s = poly_add(poly_mul(controller.num_poly, plant.num), poly_mul(controller.den_poly, plant.den))
    else:
        cn = [c.lift(plant_format) for c in controller.num]
        cd = [c.lift(plant_format) for c in controller.den]
        gn = quantize_poly(plant.num.coeffs, plant_format)
        gd = quantize_poly(plant.den.coeffs, plant_format)
        values = _fixed_poly_add(_fixed_poly_mul(cn, gn), _fixed_poly_mul(cd, gd))
        s = Poly(tuple(v.value for v in values))
    if s.leading == 0:
        raise DegenerateCharPoly(f"characteristic polynomial degenerates: {s}")
    return s


def _strip_interval_poly(p):
    coeffs = p.coeffs
    while len(coeffs) > 1 and coeffs[0].is_point() and coeffs[0].lo == 0:
        coeffs = coeffs[1:]
    return IntervalPoly(coeffs)


def char_poly_interval(controller, num, den):
    """S(z) over interval plant coefficients; the controller is a point."""
    cn = IntervalPoly.from_points(c.value for c in controller.num)
    cd = IntervalPoly.from_points(c.value for c in controller.den)
    s = interval_poly_add(interval_poly_mul(cn, _strip_interval_poly(num)),
                          interval_poly_mul(cd, _strip_interval_poly(den)))
    if s.coeffs[0].is_point() and s.coeffs[0].lo == 0:
        raise DegenerateCharPoly("interval characteristic polynomial has a zero leading coefficient")
    return s


def family_char_poly(controller, family, inflate=True):
    num, den = family_to_interval_poly(family, inflate=inflate)
    return char_poly_interval(controller, num, den)


def _roots(poly):
    poly = poly.normalize()
    if poly.is_zero() or poly.degree == 0:
        return np.array([])
    return np.roots([float(c) for c in poly.coeffs])


def cancellation_on_or_outside_unit_circle(controller, plant, tol=DEFAULT_CANCELLATION_TOL):
    """True iff C·G has a zero and a pole within ``tol`` of each other, on or outside |z| = 1."""
    if isinstance(controller, Controller):
        controller = controller.as_transfer_function()
    zeros = _roots(poly_mul(controller.num, plant.num))
    poles = _roots(poly_mul(controller.den, plant.den))
    for z in zeros:
        if abs(z) < 1 - tol:
            continue
        for p in poles:
            if abs(p) >= 1 - tol and abs(z - p) <= tol:
                return True
    return False
