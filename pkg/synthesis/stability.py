"""
Jury's stability test for S(z) = a0 z^N + ... + aN.

The table holds the successive reduced polynomials: row 1 of each pair is
the current polynomial, row 2 its reversal, and the next pair is
``v1j - (v1,last / v11) * v2j``. Stable iff

    R1  S(1) > 0
    R2  (-1)^N S(-1) > 0
    R3  |aN| < a0
    R4  every leading entry m(2k+1),1 > 0, k = 0..N-2, and the last
        reduced quadratic satisfies |m(2N-3),3| < m(2N-3),1

(a0 > 0 after normalisation). The same recursion runs over exact rationals
and over ``RationalInterval`` coefficients.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .exceptions import DegenerateCharPoly
from .interval import IntervalPoly, RationalInterval, iv_abs
from .transfer import Poly


class JuryStatus(str, Enum):
    STABLE = 'Stable'
    UNSTABLE = 'Unstable'
    UNKNOWN = 'Unknown'


class Condition(str, Enum):
    R1 = 'R1'
    R2 = 'R2'
    R3 = 'R3'
    R4 = 'R4'


@dataclass(frozen=True)
class JuryTable:
    rows: tuple = ()

    @property
    def pivots(self):
        return tuple(self.rows[i][0] for i in range(0, len(self.rows), 2))


@dataclass(frozen=True)
class JuryVerdict:
    status: JuryStatus
    violated: Condition = None
    margin: Fraction = Fraction(0)
    table: JuryTable = field(default=None, compare=False, repr=False)

    @property
    def stable(self):
        return self.status is JuryStatus.STABLE

    def as_dict(self):
        return {
            'status': self.status.value,
            'violated': self.violated.value if self.violated else None,
            'margin': str(self.margin),
        }


# ─────────────────────────────────────────────
# Exact coefficients
# ─────────────────────────────────────────────

def _alternating_sum(coeffs):
    return sum(c if i % 2 == 0 else -c for i, c in enumerate(coeffs))


def jury_stable(S, mirrored_r3=False):
    coeffs = list(S.normalize().coeffs if isinstance(S, Poly) else Poly(tuple(S)).normalize().coeffs)
    if all(c == 0 for c in coeffs):
        raise DegenerateCharPoly("zero polynomial")
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    n = len(coeffs) - 1
    if n == 0:
        return JuryVerdict(JuryStatus.STABLE, None, coeffs[0], JuryTable())

    slacks = [
        (Condition.R1, sum(coeffs)),
        (Condition.R2, _alternating_sum(coeffs)),
        (Condition.R3, abs(coeffs[-1]) - abs(coeffs[0]) if mirrored_r3 else coeffs[0] - abs(coeffs[-1])),
    ]

    rows = []
    row = coeffs
    for k in range(n - 1):
        rows.extend([tuple(row), tuple(reversed(row))])
        slacks.append((Condition.R4, row[0]))
        if row[0] <= 0:
            break
        if k == n - 2:
            slacks.append((Condition.R4, row[0] - abs(row[2])))
            break
        alpha = row[-1] / row[0]
        last = len(row) - 1
        row = [row[j] - alpha * row[last - j] for j in range(last)]

    violated = next((cond for cond, s in slacks if s <= 0), None)
    margin = min(s for _, s in slacks)
    status = JuryStatus.STABLE if violated is None else JuryStatus.UNSTABLE
    return JuryVerdict(status, violated, margin, JuryTable(tuple(rows)))


# ─────────────────────────────────────────────
# Interval coefficients
# ─────────────────────────────────────────────

def jury_stable_interval(S, mirrored_r3=False):
    """
    Stable when every condition holds for the whole box, Unstable when one
    provably fails for every member, Unknown otherwise.
    """
    coeffs = list(S.coeffs if isinstance(S, IntervalPoly) else IntervalPoly(tuple(S)).coeffs)
    lead = coeffs[0]
    if lead.contains_zero():
        return JuryVerdict(JuryStatus.UNKNOWN, None, min(lead.lo, -lead.hi), JuryTable())
    if lead.hi < 0:
        coeffs = [-c for c in coeffs]
    n = len(coeffs) - 1
    if n == 0:
        return JuryVerdict(JuryStatus.STABLE, None, coeffs[0].lo, JuryTable())

    zero = RationalInterval.point(0)
    total = sum(coeffs, zero)
    alternating = sum((c if i % 2 == 0 else -c for i, c in enumerate(coeffs)), zero)
    if mirrored_r3:
        r3 = iv_abs(coeffs[-1]) - iv_abs(coeffs[0])
    else:
        r3 = coeffs[0] - iv_abs(coeffs[-1])
    slacks = [(Condition.R1, total), (Condition.R2, alternating), (Condition.R3, r3)]

    rows = []
    row = coeffs
    singular = False
    for k in range(n - 1):
        rows.extend([tuple(row), tuple(reversed(row))])
        slacks.append((Condition.R4, row[0]))
        if not row[0].positive():
            # the pivot cannot be divided by; the verdict rests on the slacks so far
            singular = not row[0].nonpositive()
            break
        if k == n - 2:
            slacks.append((Condition.R4, row[0] - iv_abs(row[2])))
            break
        alpha = row[-1] / row[0]
        last = len(row) - 1
        row = [row[j] - alpha * row[last - j] for j in range(last)]

    margin = min(s.lo for _, s in slacks)
    failed = next((cond for cond, s in slacks if s.nonpositive()), None)
    if failed is not None:
        return JuryVerdict(JuryStatus.UNSTABLE, failed, margin, JuryTable(tuple(rows)))
    undecided = next((cond for cond, s in slacks if not s.positive()), None)
    if undecided is not None or singular:
        return JuryVerdict(JuryStatus.UNKNOWN, undecided or Condition.R4, margin, JuryTable(tuple(rows)))
    return JuryVerdict(JuryStatus.STABLE, None, margin, JuryTable(tuple(rows)))


# ─────────────────────────────────────────────
# Independent oracle (tests and spot checks only)
# ─────────────────────────────────────────────

def roots(S):
    coeffs = S.normalize().coeffs if isinstance(S, Poly) else tuple(S)
    return np.roots([float(c) for c in coeffs])


def root_oracle(S):
    """Largest root modulus, from the companion-matrix eigenvalues."""
    r = roots(S)
    if len(r) == 0:
        return 0.0
    return float(np.max(np.abs(r)))
