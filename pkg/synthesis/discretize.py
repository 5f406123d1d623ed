"""
Zero-order-hold discretization of a continuous plant G(s).

G(s) is realised in controllable canonical form, the augmented matrix
exp([[A, B], [0, 0]] T) yields (Ad, Bd), and the pulse transfer function
C (zI - Ad)^-1 Bd + D is read back as polynomials. The numeric work runs at
128 bits; coefficients are then snapped to nearby rationals.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .exceptions import ImproperTransferFunction, NonpositiveSampleTime
from .fixedpoint import to_fraction
from .transfer import Poly, TransferFunction

logger = logging.getLogger(__name__)

WORKING_PRECISION = 128
SNAP_TOLERANCE = Fraction(1, 10 ** 12)
# ZOH coefficients: G(1) and the pole map must hold to 1e-9 even when 1 - e^(pT) is tiny
ZOH_SNAP_TOLERANCE = Fraction(1, 10 ** 24)


@dataclass(frozen=True)
class ContinuousTF:
    num: Poly
    den: Poly
    sample_time: Fraction

    def __post_init__(self):
        if not isinstance(self.num, Poly):
            object.__setattr__(self, 'num', Poly(tuple(self.num)))
        if not isinstance(self.den, Poly):
            object.__setattr__(self, 'den', Poly(tuple(self.den)))
        object.__setattr__(self, 'sample_time', to_fraction(self.sample_time))

    def poles(self):
        den = self.den.normalize()
        if den.degree == 0:
            return np.array([])
        return np.roots([float(c) for c in den.coeffs])


def matrix_exp(A, t=1):
    """exp(A t) for a square mpmath matrix at the current working precision."""
    A = mpmath.matrix(A)
    if A.rows != A.cols:
        raise ValueError("matrix_exp needs a square matrix")
    # mpmath's Taylor route scales and squares internally
    return mpmath.expm(A * mpmath.mpf(t), method='taylor')


def _char_poly(M):
    """Faddeev-LeVerrier: det(zI - M) coefficients, descending, leading 1."""
    n = M.rows
    coeffs = [mpmath.mpf(1)]
    identity = mpmath.eye(n)
    Mk = mpmath.zeros(n, n)
    c = mpmath.mpf(1)
    for k in range(1, n + 1):
        Mk = M * (Mk + c * identity)
        c = -sum(Mk[i, i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def mpf_to_fraction(x):
    """Exact rational value of a finite mpf, sign included."""
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"cannot convert {x} to a rational")
    sign, man, exp, _ = x._mpf_
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def snap_to_rational(x, tolerance=SNAP_TOLERANCE):
    """Simplest continued-fraction convergent within ``tolerance`` of x."""
    exact = mpf_to_fraction(x)
    limit = 1
    while True:
        candidate = exact.limit_denominator(limit)
        if abs(candidate - exact) <= tolerance:
            return candidate
        limit *= 10


def _mp(q):
    return mpmath.mpf(q.numerator) / q.denominator


def _realize(g):
    """Controllable canonical (A, B, C, D) of a proper G(s)."""
    num, den = g.num.normalize(), g.den.normalize()
    n = den.degree
    if num.degree > n and not num.is_zero():
        raise ImproperTransferFunction(f"deg num {num.degree} > deg den {n}")
    lead = den.leading
    a = [c / lead for c in den.coeffs]
    b = [Fraction(0)] * (n + 1 - len(num.coeffs)) + [c / lead for c in num.coeffs]
    d = b[0]
    c_row = [b[i] - d * a[i] for i in range(1, n + 1)]
    A = mpmath.zeros(n, n)
    for j in range(n):
        A[0, j] = -_mp(a[j + 1])
    for i in range(1, n):
        A[i, i - 1] = 1
    B = mpmath.zeros(n, 1)
    B[0, 0] = 1
    C = mpmath.matrix([[_mp(c) for c in c_row]])
    return A, B, C, d


def zoh_discretize(g):
    if g.sample_time <= 0:
        raise NonpositiveSampleTime(f"sample time must be positive, got {g.sample_time}")
    num, den = g.num.normalize(), g.den.normalize()
    if den.is_zero():
        raise ImproperTransferFunction("denominator is identically zero")
    if num.degree > den.degree and not num.is_zero():
        raise ImproperTransferFunction(f"deg num {num.degree} > deg den {den.degree}")

    T = float(g.sample_time)
    poles = g.poles()
    if len(poles) and max(abs(p) * T for p in poles) > math.pi:
        logger.warning("sample time %s may violate the Nyquist criterion: max |pT| = %.3f",
                       g.sample_time, max(abs(p) * T for p in poles))

    if den.degree == 0:
        return TransferFunction(Poly((num.coeffs[-1] / den.leading,)), Poly((Fraction(1),)))

    with mpmath.workprec(WORKING_PRECISION):
        A, B, C, d = _realize(g)
        n = A.rows
        t = mpmath.mpf(g.sample_time.numerator) / g.sample_time.denominator
        augmented = mpmath.zeros(n + 1, n + 1)
        for i in range(n):
            for j in range(n):
                augmented[i, j] = A[i, j]
            augmented[i, n] = B[i, 0]
        phi = matrix_exp(augmented, t)
        Ad = mpmath.matrix([[phi[i, j] for j in range(n)] for i in range(n)])
        Bd = mpmath.matrix([[phi[i, n]] for i in range(n)])

        den_z = _char_poly(Ad)
        # C adj(zI - Ad) Bd = det(zI - Ad + Bd C) - det(zI - Ad)
        closed = _char_poly(Ad - Bd * C)
        num_z = [closed[i] - den_z[i] + _mp(d) * den_z[i] for i in range(n + 1)]
        num_coeffs = [snap_to_rational(x, ZOH_SNAP_TOLERANCE) for x in num_z]
        den_coeffs = [snap_to_rational(x, ZOH_SNAP_TOLERANCE) for x in den_z]

    logger.debug("ZOH(T=%s): num=%s den=%s", g.sample_time, num_coeffs, den_coeffs)
    return TransferFunction(Poly(tuple(num_coeffs)), Poly(tuple(den_coeffs)))
