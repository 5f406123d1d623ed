"""
Closed-loop simulation and frequency-domain margins.

Loop: r -> e = r - (y + v1) -> C (fixed point) -> u + v2 -> G -> y.
The controller runs in fixed point with truncation; the plant runs in
high-precision reals (mpmath).
"""
import logging
import random
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from fractions import Fraction

import mpmath
import numpy as np

from .discretize import mpf_to_fraction
from .exceptions import ArithmeticOverflow, DegenerateLoop, EvaluationSingularity, FixedPointOverflow
from .fixedpoint import MAX_WORD_BITS, FixedPointFormat, FixedPointValue, quantize_truncate, to_fraction
from .transfer import Controller, TransferFunction, poly_add, poly_mul

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 10 ** 6
SIGNAL_INTEGER_BITS = 40
PLANT_DIGITS = 50
FREQUENCY_POINTS = 10_001


class NoiseMode(str, Enum):
    ZERO = 'zero'
    WORST_CASE = 'worst-case-bound'
    UNIFORM = 'seeded-uniform'


@dataclass(frozen=True)
class NoiseModel:
    """ADC (q1) and DAC (q2) quantization steps; injected noise stays within q/2."""
    q1: Fraction = Fraction(0)
    q2: Fraction = Fraction(0)
    mode: NoiseMode = NoiseMode.ZERO

    def __post_init__(self):
        object.__setattr__(self, 'q1', to_fraction(self.q1))
        object.__setattr__(self, 'q2', to_fraction(self.q2))
        object.__setattr__(self, 'mode', NoiseMode(self.mode))
        if self.q1 < 0 or self.q2 < 0:
            raise ValueError("quantization steps must be non-negative")

    def sample(self, step, rng, sign):
        half = step / 2
        if self.mode is NoiseMode.ZERO or half == 0:
            return mpmath.mpf(0)
        if self.mode is NoiseMode.WORST_CASE:
            value = half if sign >= 0 else -half
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(rng.uniform(-float(half), float(half)))


@dataclass(frozen=True)
class Sample:
    k: int
    t: Fraction
    r: Fraction
    e: FixedPointValue
    u: FixedPointValue
    y: object


@dataclass
class SimulationTrace:
    sample_time: Fraction
    samples: list = field(default_factory=list)
    diverged_at: int = None

    def __len__(self):
        return len(self.samples)

    @property
    def outputs(self):
        return [s.y for s in self.samples]

    def max_abs_output(self):
        return max((abs(s.y) for s in self.samples), default=mpmath.mpf(0))

    def to_csv(self):
        lines = ["k,t,r,e,u,y"]
        for s in self.samples:
            lines.append(",".join([str(s.k), _decimal(s.t), _decimal(s.r), s.e.to_decimal(),
                                   s.u.to_decimal(), mpmath.nstr(s.y, 20)]))
        return "\n".join(lines) + "\n"


def _decimal(q):
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return format(Decimal(q.numerator) / Decimal(q.denominator), 'f')


def _mp(q):
    q = to_fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def _sign(x):
    return 1 if x >= 0 else -1


def _controller_recurrence(controller, fmt):
    """(beta, alpha, delay) in the signal format, alpha[0] != 0."""
    num = [c.lift(fmt) for c in controller.num]
    den = [c.lift(fmt) for c in controller.den]
    while den and den[0].is_zero():
        den = den[1:]
    if not den:
        if any(not c.is_zero() for c in num):
            raise DegenerateLoop("controller denominator is identically zero")
        return None
    while len(num) > 1 and num[0].is_zero():
        num = num[1:]
    delay = len(den) - len(num)
    if delay < 0:
        raise DegenerateLoop("controller is improper")
    return num, den, delay


def step_response(controller, plant, sample_time, steps, noise=None, seed=0, reference=1,
                  signal_format=None):
    if steps < 1:
        raise ValueError("steps must be >= 1")
    noise = noise or NoiseModel()
    rng = random.Random(seed)
    T = to_fraction(sample_time)
    r = to_fraction(reference)
    F = controller.format.fraction_bits
    fmt = signal_format or FixedPointFormat(min(SIGNAL_INTEGER_BITS, MAX_WORD_BITS - F), F)
    recurrence = _controller_recurrence(controller, fmt)
    zero = FixedPointValue.zero(fmt)

    plant = plant.normalize()
    # a biproper plant sees the previous control sample (one-sample computation delay)
    plant_delay = max(len(plant.den.coeffs) - len(plant.num.coeffs), 1)

    trace = SimulationTrace(T)
    e_hist, u_hist, y_hist, v_hist = [], [], [], []
    with mpmath.workdps(PLANT_DIGITS):
        b = [_mp(c) for c in plant.num.coeffs]
        a = [_mp(c) for c in plant.den.coeffs]
        threshold = _mp(DIVERGENCE_FACTOR * max(abs(r), 1))
        r_mp = _mp(r)
        for k in range(steps):
            acc = mpmath.mpf(0)
            for i, bi in enumerate(b):
                idx = k - plant_delay - i
                if idx >= 0:
                    acc += bi * v_hist[idx]
            for j in range(1, len(a)):
                if k - j >= 0:
                    acc -= a[j] * y_hist[k - j]
            y = acc / a[0]
            y_hist.append(y)

            previous_error = e_hist[-1].value if e_hist else r
            measured = y + noise.sample(noise.q1, rng, _sign(previous_error))
            try:
                e = quantize_truncate(mpf_to_fraction(r_mp - measured), fmt)
                u = _control(recurrence, e_hist + [e], u_hist, zero)
            except FixedPointOverflow as exc:
                raise ArithmeticOverflow(k) from exc
            e_hist.append(e)
            u_hist.append(u)
            v_hist.append(_mp(u.value) + noise.sample(noise.q2, rng, _sign(e.value)))

            trace.samples.append(Sample(k, k * T, r, e, u, y))
            if abs(y) > threshold:
                trace.diverged_at = k
                logger.info("trace diverged at step %d (|y| = %s)", k, mpmath.nstr(abs(y), 8))
                break
    return trace


def _control(recurrence, e_hist, u_hist, zero):
    if recurrence is None:
        return zero
    num, den, delay = recurrence
    k = len(e_hist) - 1
    acc = zero
    for i, beta in enumerate(num):
        idx = k - delay - i
        if idx >= 0:
            acc = acc + beta * e_hist[idx]
    for j in range(1, len(den)):
        if k - j >= 0:
            acc = acc - den[j] * u_hist[k - j]
    return acc / den[0]


# ─────────────────────────────────────────────
# Sensitivity functions
# ─────────────────────────────────────────────

def sensitivity_functions(controller, plant):
    """H1 = 1/(1+GC), H2 = G/(1+GC), H3 = GC/(1+GC), all over S(z)."""
    if isinstance(controller, Controller):
        controller = controller.as_transfer_function()
    cn, cd = controller.num, controller.den
    gn, gd = plant.num, plant.den
    loop_num = poly_mul(cn, gn)
    open_den = poly_mul(cd, gd)
    s = poly_add(loop_num, open_den)
    if s.is_zero():
        raise DegenerateLoop("1 + G·C is identically zero")
    s = s.normalize()
    return (TransferFunction(open_den, s),
            TransferFunction(poly_mul(gn, cd), s),
            TransferFunction(loop_num, s))


# ─────────────────────────────────────────────
# Frequency-domain margins
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class Margins:
    gain_margin_db: float
    phase_margin_deg: float
    phase_crossover: float = None
    gain_crossover: float = None

    def as_dict(self):
        return {
            'gain_margin_db': self.gain_margin_db,
            'phase_margin_deg': self.phase_margin_deg,
            'phase_crossover_rad_s': self.phase_crossover,
            'gain_crossover_rad_s': self.gain_crossover,
        }


def format_margins(margins):
    return "".join(f"{key}={value}\n" for key, value in margins.as_dict().items())


def _loop_response(controller, plant, omega, T):
    z = np.exp(1j * omega * T)
    num = np.polyval([float(c) for c in poly_mul(controller.num, plant.num).coeffs], z)
    den = np.polyval([float(c) for c in poly_mul(controller.den, plant.den).coeffs], z)
    return num, den


def frequency_margins(controller, plant, sample_time, points=FREQUENCY_POINTS):
    if isinstance(controller, Controller):
        controller = controller.as_transfer_function()
    T = float(to_fraction(sample_time))
    nyquist = np.pi / T
    omega = np.geomspace(nyquist * 1e-5, nyquist, points)
    for attempt in range(2):
        num, den = _loop_response(controller, plant, omega, T)
        if np.all(np.abs(den) > 1e-12):
            break
        if attempt == 1:
            raise EvaluationSingularity("loop has a pole on the sampled unit circle")
        omega = omega * (1 - 1e-7)
    L = num / den
    mag = np.abs(L)

    gain_margin, phase_w = np.inf, None
    im, re = L.imag, L.real
    for i in range(len(omega) - 1):
        if (im[i] > 0) != (im[i + 1] > 0) and im[i] != im[i + 1]:
            frac = im[i] / (im[i] - im[i + 1])
            crossing = L[i] + frac * (L[i + 1] - L[i])
            if crossing.real < 0:
                gm = -20 * np.log10(abs(crossing.real))
                if gm < gain_margin:
                    gain_margin, phase_w = gm, omega[i] + frac * (omega[i + 1] - omega[i])
    if abs(im[-1]) <= 1e-9 * max(1.0, mag[-1]) and re[-1] < 0:
        gm = -20 * np.log10(abs(re[-1]))
        if gm < gain_margin:
            gain_margin, phase_w = gm, omega[-1]

    phase_margin, gain_w = np.inf, None
    above = mag > 1
    for i in range(len(omega) - 1):
        if above[i] != above[i + 1]:
            frac = (mag[i] - 1) / (mag[i] - mag[i + 1])
            crossing = L[i] + frac * (L[i + 1] - L[i])
            pm = 180 + np.degrees(np.angle(crossing))
            pm = (pm + 180) % 360 - 180
            if abs(pm) < abs(phase_margin):
                phase_margin, gain_w = pm, omega[i] + frac * (omega[i + 1] - omega[i])

    return Margins(float(gain_margin), float(phase_margin),
                   None if phase_w is None else float(phase_w),
                   None if gain_w is None else float(gain_w))
