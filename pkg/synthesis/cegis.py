"""
Counterexample-guided inductive synthesis of fixed-point controllers.

Two engines share the candidate search:

* two-stage: search against a finite set of concrete plants, then check the
  candidate on the plant box in fixed point (uncertainty stage) and finally
  on the inflated interval enclosure (precision stage). A precision failure
  widens <Ip,Fp> by (+4,+4) and empties the counterexample set.
* one-stage: search directly against the interval Jury test over the whole
  family.
"""
import itertools
import logging
import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .exceptions import (CounterexampleExtractionFailed, DegenerateCharPoly, DivisorContainsZero,
                         FixedPointOverflow, NoCandidate, SearchTimeout)
from .fixedpoint import FixedPointFormat, FixedPointValue, RoundingMode, grid_values, quantize
from .interval import IntervalPoly
from .stability import JuryStatus, JuryVerdict, jury_stable, jury_stable_interval, root_oracle
from .transfer import (Controller, cancellation_on_or_outside_unit_circle, char_poly,
                       char_poly_interval, family_char_poly)

logger = logging.getLogger(__name__)

DEFAULT_PLANT_FORMAT = FixedPointFormat(16, 24)
PRECISION_STEP = (4, 4)
EXHAUSTIVE_LIMIT = 1 << 20
MAX_SUBDIVISION_DEPTH = 8
DESCENT_ROUNDS = 16
BOUNDARY_COST = Fraction(1, 2 ** 64)


@dataclass(frozen=True)
class Limits:
    max_iterations: int = 64
    max_precision: FixedPointFormat = FixedPointFormat(32, 32)
    timeout: float = 600
    search_budget: int = 200_000

    @classmethod
    def from_settings(cls, overrides=None):
        from django.conf import settings

        conf = dict(settings.SYNTHESIS)
        conf.update({k: v for k, v in (overrides or {}).items() if v is not None})
        max_precision = conf['MAX_PRECISION']
        if isinstance(max_precision, str):
            max_precision = FixedPointFormat.parse(max_precision)
        return cls(int(conf['MAX_ITERATIONS']), max_precision, float(conf['TIMEOUT']),
                   int(conf['SEARCH_BUDGET']))


class Phase(str, Enum):
    SYNTHESIZE = 'synthesize'
    COUNTEREXAMPLE = 'counterexample'
    UNCERTAINTY_OK = 'uncertainty-ok'
    PRECISION_FAILED = 'precision-failed'
    INCREASE_PRECISION = 'increase-precision'
    VERIFIED = 'verified'


class FailureReason(str, Enum):
    ITERATION_LIMIT = 'IterationLimit'
    PRECISION_LIMIT = 'PrecisionLimit'
    TIMEOUT = 'Timeout'
    NO_CANDIDATE = 'NoCandidate'
    EXTRACTION_FAILED = 'CounterexampleExtractionFailed'


@dataclass(frozen=True)
class TranscriptRecord:
    phase: Phase
    iteration: int
    precision: FixedPointFormat
    candidate: Controller = None
    counterexample: object = None

    def as_dict(self):
        return {
            'phase': self.phase.value,
            'iteration': self.iteration,
            'precision': str(self.precision),
            'candidate': None if self.candidate is None else {
                'num': [c.to_decimal() for c in self.candidate.num],
                'den': [c.to_decimal() for c in self.candidate.den],
            },
            'counterexample': None if self.counterexample is None else {
                'num': [str(c) for c in self.counterexample.num.coeffs],
                'den': [str(c) for c in self.counterexample.den.coeffs],
            },
        }


@dataclass
class CegisState:
    plant_format: FixedPointFormat
    seed: int
    inputs: list = field(default_factory=list)
    candidate: Controller = None
    iteration: int = 0

    def widen(self):
        self.plant_format = self.plant_format.widen(*PRECISION_STEP)
        # counterexamples were snapped to the old grid
        self.inputs.clear()


@dataclass
class SynthesisResult:
    success: bool
    controller: Controller = None
    plant_format: FixedPointFormat = None
    iterations: int = 0
    wall_time: float = 0.0
    reason: FailureReason = None
    certificate: object = None
    transcript: list = field(default_factory=list)
    interval_checks: int = 0

    @property
    def outcome(self):
        return 'Success' if self.success else 'Failure'


@dataclass(frozen=True)
class UncertaintyOutcome:
    ok: bool
    counterexample: object = None
    verdict: object = None


# ─────────────────────────────────────────────
# Candidate search
# ─────────────────────────────────────────────

def _shortfall(verdict, min_margin):
    if verdict.stable and verdict.margin >= min_margin:
        return Fraction(0)
    # an unstable loop with zero slack still costs something
    return max(min_margin - verdict.margin, BOUNDARY_COST)


def _fails_jury(candidate, plant, plant_format):
    try:
        return not jury_stable(char_poly(candidate, plant, plant_format)).stable
    except (DegenerateCharPoly, FixedPointOverflow):
        return True


def input_cost(candidate, inputs, plant_format=None, min_margin=0):
    """
    Sum over inputs of max(0, -margin) of the Jury test.

    ``min_margin`` demands that much slack on top of Jury stability; the
    default accepts any Jury-stable loop.
    """
    if not inputs:
        return Fraction(0)
    if candidate.den[0].is_zero():
        return math.inf
    total = Fraction(0)
    for plant in inputs:
        try:
            verdict = jury_stable(char_poly(candidate, plant, plant_format))
        except (DegenerateCharPoly, FixedPointOverflow):
            return math.inf
        total += _shortfall(verdict, min_margin)
    return total


def interval_cost(candidate, family, min_margin=0):
    if candidate.den[0].is_zero():
        return math.inf
    try:
        verdict = jury_stable_interval(family_char_poly(candidate, family, inflate=True))
    except (DegenerateCharPoly, DivisorContainsZero):
        return math.inf
    return _shortfall(verdict, min_margin)


class _Search:
    """Seeded hill climbing over the raw coefficient grid."""

    def __init__(self, cost, fmt, orders, seed, budget, deadline=None):
        if budget <= 0:
            raise NoCandidate("search budget must be positive")
        self.cost = cost
        self.fmt = fmt
        self.template = Controller.zero(orders, fmt)
        self.size = len(self.template.coefficients)
        self.rng = random.Random(seed)
        self.budget = budget
        self.deadline = deadline
        self.evaluations = 0

    def evaluate(self, raws):
        if self.evaluations >= self.budget:
            raise NoCandidate(f"no candidate within {self.budget} evaluations")
        if self.deadline is not None and self.evaluations % 64 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout("candidate search ran out of time")
        self.evaluations += 1
        candidate = self.candidate(raws)
        return candidate, self.cost(candidate)

    def candidate(self, raws):
        return self.template.with_coefficients(FixedPointValue(r, self.fmt) for r in raws)

    def grid_size(self):
        return (2 * self.fmt.max_raw - 1) ** self.size

    def exhaustive(self):
        raw_grid = [v.raw for v in grid_values(self.fmt)]
        for raws in itertools.product(raw_grid, repeat=self.size):
            candidate, cost = self.evaluate(raws)
            if cost == 0:
                return candidate
        raise NoCandidate(f"no stabilizing controller in the {self.fmt} grid")

    def ladder(self):
        width = self.fmt.integer_bits + self.fmt.fraction_bits
        return [1 << k for k in range(width - 1, -1, -1)]

    def climb(self, raws, cost):
        top = self.fmt.max_raw
        steps = self.ladder()
        while True:
            improved = False
            for i in range(self.size):
                for step in steps:
                    moved = False
                    for sign in (1, -1):
                        value = raws[i] + sign * step
                        if abs(value) >= top:
                            continue
                        trial = raws[:i] + [value] + raws[i + 1:]
                        _, trial_cost = self.evaluate(trial)
                        if trial_cost < cost:
                            raws, cost, moved = trial, trial_cost, True
                            break
                    if moved:
                        improved = True
                        break
                if cost == 0:
                    return raws, cost
            if not improved:
                return raws, cost

    def restart_point(self):
        span = min(self.fmt.scale, self.fmt.max_raw - 1)
        return [self.rng.randint(-span, span) for _ in range(self.size)]

    def run(self):
        raws = [0] * self.size
        candidate, cost = self.evaluate(raws)
        if cost == 0:
            return candidate
        if self.grid_size() <= EXHAUSTIVE_LIMIT:
            return self.exhaustive()
        restarts = 0
        while True:
            raws, cost = self.climb(raws, cost)
            if cost == 0:
                return self.candidate(raws)
            restarts += 1
            logger.debug("search restart %d after %d evaluations (cost %s)",
                         restarts, self.evaluations, float(cost))
            raws = self.restart_point()
            _, cost = self.evaluate(raws)


def synthesize_candidate(inputs, controller_format, orders, seed=0, budget=200_000, plant_format=None,
                         cost=None, deadline=None):
    """
    A controller whose loop with every plant in ``inputs`` passes Jury.

    The all-zero controller is always probed first, so an empty input set
    returns it immediately.
    """
    if min(orders) < 0:
        raise ValueError("controller orders must be non-negative")
    inputs = list(inputs)
    if cost is None:
        def cost(candidate):
            return input_cost(candidate, inputs, plant_format)
    search = _Search(cost, controller_format, orders, seed, budget, deadline)
    candidate = search.run()
    logger.debug("candidate %s after %d evaluations", candidate, search.evaluations)
    return candidate


# ─────────────────────────────────────────────
# Verification stages
# ─────────────────────────────────────────────

def _box_polys(box, num_length):
    return IntervalPoly(box[:num_length]), IntervalPoly(box[num_length:])


def _box_verdict(candidate, box, num_length):
    try:
        return jury_stable_interval(char_poly_interval(candidate, *_box_polys(box, num_length)))
    except (DegenerateCharPoly, DivisorContainsZero):
        return None


def _snap_into(value, iv, fmt):
    """Nearest grid point to ``value`` that still lies in ``iv``."""
    snapped = quantize(value, fmt, RoundingMode.NEAREST).value
    if iv.contains(snapped):
        return snapped
    lo = Fraction(math.ceil(iv.lo * fmt.scale), fmt.scale)
    hi = Fraction(math.floor(iv.hi * fmt.scale), fmt.scale)
    if lo <= hi:
        return min(max(snapped, lo), hi)
    return value


def _witness(candidate, family, vector):
    plant = family.plant_from_vector(vector)
    if _fails_jury(candidate, plant, family.plant_format):
        return plant
    return None


def _margin_at(candidate, family, vector):
    try:
        S = char_poly(candidate, family.plant_from_vector(vector), family.plant_format)
        return jury_stable(S).margin
    except (DegenerateCharPoly, FixedPointOverflow):
        return -math.inf


def _search_vertices(candidate, family, box):
    fmt = family.plant_format
    choices = [(iv.lo,) if iv.is_point() else (iv.lo, iv.hi) for iv in box]
    for corner in itertools.product(*choices):
        vector = [_snap_into(v, iv, fmt) for v, iv in zip(corner, box)]
        plant = _witness(candidate, family, vector)
        if plant is not None:
            return plant
    return None


def _coordinate_descent(candidate, family, box):
    fmt = family.plant_format
    vector = [_snap_into(iv.mid, iv, fmt) for iv in box]
    margin = _margin_at(candidate, family, vector)
    for _ in range(DESCENT_ROUNDS):
        improved = False
        for i, iv in enumerate(box):
            if iv.is_point():
                continue
            for probe in (iv.lo, iv.hi, (iv.lo + vector[i]) / 2, (vector[i] + iv.hi) / 2):
                trial = vector[:i] + [_snap_into(probe, iv, fmt)] + vector[i + 1:]
                trial_margin = _margin_at(candidate, family, trial)
                if trial_margin < margin:
                    vector, margin, improved = trial, trial_margin, True
        plant = _witness(candidate, family, vector)
        if plant is not None:
            return plant
        if not improved:
            return None
    return None


def _subdivide(candidate, family, box, depth):
    """
    Split undecided boxes along their widest side.

    Returns (witness or None, proved) where proved means every leaf is
    interval-Stable.
    """
    verdict = _box_verdict(candidate, box, family.num_length)
    if verdict is not None and verdict.stable:
        return None, True
    plant = _search_vertices(candidate, family, box)
    if plant is None:
        plant = _witness(candidate, family, [_snap_into(iv.mid, iv, family.plant_format) for iv in box])
    if plant is not None:
        return plant, False
    widest = max(range(len(box)), key=lambda i: box[i].width)
    if depth >= MAX_SUBDIVISION_DEPTH or box[widest].width == 0:
        return None, False
    proved = True
    for half in box[widest].split():
        sub = box[:widest] + (half,) + box[widest + 1:]
        plant, sub_proved = _subdivide(candidate, family, sub, depth + 1)
        if plant is not None:
            return plant, False
        proved = proved and sub_proved
    return None, proved


def verify_uncertainty(candidate, family):
    """
    Check the candidate over the grid-snapped Δp box.

    Ok when the interval Jury test says Stable, otherwise a concrete plant on
    the <Ip,Fp> grid whose fixed-point loop fails Jury.
    """
    box = family.grid_box()
    verdict = _box_verdict(candidate, box, family.num_length)
    if verdict is not None and verdict.stable:
        return UncertaintyOutcome(True, None, verdict)

    plant = _search_vertices(candidate, family, box)
    if plant is None:
        plant = _coordinate_descent(candidate, family, box)
    if plant is None:
        plant, proved = _subdivide(candidate, family, box, 0)
        if plant is None and proved:
            logger.info("uncertainty stage proved by subdivision")
            return UncertaintyOutcome(True, None, verdict)
    if plant is None:
        raise CounterexampleExtractionFailed(
            f"no concrete witness for {candidate} at {family.plant_format}")
    return UncertaintyOutcome(False, plant, verdict)


def verify_precision(candidate, family):
    """Interval Jury over the full enclosure (Δp box plus grid error)."""
    return precision_certificate(candidate, family).status is JuryStatus.STABLE


def precision_certificate(candidate, family):
    try:
        return jury_stable_interval(family_char_poly(candidate, family, inflate=True))
    except (DegenerateCharPoly, DivisorContainsZero):
        return JuryVerdict(JuryStatus.UNKNOWN)


# ─────────────────────────────────────────────
# Engines
# ─────────────────────────────────────────────

class _Clock:
    def __init__(self, timeout):
        self.start = time.monotonic()
        self.deadline = None if timeout is None else self.start + timeout

    @property
    def elapsed(self):
        return time.monotonic() - self.start

    def expired(self):
        return self.deadline is not None and time.monotonic() >= self.deadline


def _failure(reason, state, clock, transcript, checks):
    logger.info("synthesis failed: %s after %d iterations", reason.value, state.iteration)
    return SynthesisResult(False, None, state.plant_format, state.iteration, clock.elapsed, reason,
                           None, transcript, checks)


def cegis_two_stage(family, controller_format, orders, seed=0, limits=None, plant_format=None):
    limits = limits or Limits()
    state = CegisState(plant_format or family.plant_format or DEFAULT_PLANT_FORMAT, seed)
    rng = random.Random(seed)
    clock = _Clock(limits.timeout)
    transcript, checks = [], 0

    while True:
        if state.iteration >= limits.max_iterations:
            return _failure(FailureReason.ITERATION_LIMIT, state, clock, transcript, checks)
        if clock.expired():
            return _failure(FailureReason.TIMEOUT, state, clock, transcript, checks)
        state.iteration += 1
        current = family.with_format(state.plant_format)

        try:
            state.candidate = synthesize_candidate(state.inputs, controller_format, orders,
                                                   rng.getrandbits(64), limits.search_budget,
                                                   state.plant_format, deadline=clock.deadline)
        except SearchTimeout:
            return _failure(FailureReason.TIMEOUT, state, clock, transcript, checks)
        except NoCandidate:
            return _failure(FailureReason.NO_CANDIDATE, state, clock, transcript, checks)
        transcript.append(TranscriptRecord(Phase.SYNTHESIZE, state.iteration, state.plant_format,
                                           state.candidate))
        logger.info("iteration %d: candidate %s at %s", state.iteration, state.candidate, state.plant_format)

        checks += 1
        try:
            outcome = verify_uncertainty(state.candidate, current)
        except CounterexampleExtractionFailed:
            return _failure(FailureReason.EXTRACTION_FAILED, state, clock, transcript, checks)
        if not outcome.ok:
            cex = outcome.counterexample
            state.inputs.append(cex)
            transcript.append(TranscriptRecord(Phase.COUNTEREXAMPLE, state.iteration, state.plant_format,
                                               state.candidate, cex))
            logger.info("iteration %d: counterexample %s", state.iteration, cex)
            continue
        transcript.append(TranscriptRecord(Phase.UNCERTAINTY_OK, state.iteration, state.plant_format,
                                           state.candidate))

        checks += 1
        certificate = precision_certificate(state.candidate, current)
        if certificate.stable:
            transcript.append(TranscriptRecord(Phase.VERIFIED, state.iteration, state.plant_format,
                                               state.candidate))
            logger.info("iteration %d: verified at %s", state.iteration, state.plant_format)
            return SynthesisResult(True, state.candidate, state.plant_format, state.iteration,
                                   clock.elapsed, None, certificate, transcript, checks)

        transcript.append(TranscriptRecord(Phase.PRECISION_FAILED, state.iteration, state.plant_format,
                                           state.candidate))
        widened = state.plant_format.widen(*PRECISION_STEP)
        if not limits.max_precision.covers(widened):
            return _failure(FailureReason.PRECISION_LIMIT, state, clock, transcript, checks)
        state.widen()
        transcript.append(TranscriptRecord(Phase.INCREASE_PRECISION, state.iteration, state.plant_format))
        logger.info("iteration %d: precision insufficient, now %s", state.iteration, state.plant_format)


def cegis_one_stage(family, controller_format, orders, seed=0, limits=None, plant_format=None):
    limits = limits or Limits()
    state = CegisState(plant_format or family.plant_format or DEFAULT_PLANT_FORMAT, seed)
    rng = random.Random(seed)
    clock = _Clock(limits.timeout)
    transcript = []
    checks = 0

    while True:
        if state.iteration >= limits.max_iterations:
            return _failure(FailureReason.ITERATION_LIMIT, state, clock, transcript, checks)
        if clock.expired():
            return _failure(FailureReason.TIMEOUT, state, clock, transcript, checks)
        state.iteration += 1
        current = family.with_format(state.plant_format)

        def cost(candidate):
            nonlocal checks
            checks += 1
            return interval_cost(candidate, current)

        try:
            state.candidate = synthesize_candidate((), controller_format, orders, rng.getrandbits(64),
                                                   limits.search_budget, cost=cost, deadline=clock.deadline)
        except SearchTimeout:
            return _failure(FailureReason.TIMEOUT, state, clock, transcript, checks)
        except NoCandidate:
            widened = state.plant_format.widen(*PRECISION_STEP)
            if not limits.max_precision.covers(widened):
                return _failure(FailureReason.NO_CANDIDATE, state, clock, transcript, checks)
            state.widen()
            transcript.append(TranscriptRecord(Phase.INCREASE_PRECISION, state.iteration, state.plant_format))
            continue

        transcript.append(TranscriptRecord(Phase.SYNTHESIZE, state.iteration, state.plant_format,
                                           state.candidate))
        certificate = precision_certificate(state.candidate, current)
        transcript.append(TranscriptRecord(Phase.VERIFIED, state.iteration, state.plant_format,
                                           state.candidate))
        logger.info("one-stage: verified %s at %s", state.candidate, state.plant_format)
        return SynthesisResult(True, state.candidate, state.plant_format, state.iteration,
                               clock.elapsed, None, certificate, transcript, checks)


# ─────────────────────────────────────────────
# Oracle spot check
# ─────────────────────────────────────────────

def sample_family(family, fmt, n, rng):
    """All vertices of the Δp box (up to n), then random grid points inside it."""
    box = family.box(inflate=False)
    samples = []
    for plant in family.vertices(box):
        if len(samples) >= n:
            return samples
        samples.append(plant)
    while len(samples) < n:
        vector = []
        for iv in box:
            lo, hi = math.ceil(iv.lo * fmt.scale), math.floor(iv.hi * fmt.scale)
            vector.append(Fraction(rng.randint(lo, hi), fmt.scale) if lo <= hi else iv.mid)
        samples.append(family.plant_from_vector(vector))
    return samples


@dataclass(frozen=True)
class SpotCheck:
    samples: int
    oracle_failures: int
    cancellations: int

    @property
    def passed(self):
        return self.oracle_failures == 0 and self.cancellations == 0

    def as_dict(self):
        return {'samples': self.samples, 'oracle_failures': self.oracle_failures,
                'cancellations': self.cancellations, 'passed': self.passed}


def soundness_spot_check(controller, family, n=1000, seed=0, tol=1e-6):
    fmt = family.plant_format or DEFAULT_PLANT_FORMAT
    plants = sample_family(family, fmt, n, random.Random(seed))
    failures = cancellations = 0
    for plant in plants:
        try:
            if root_oracle(char_poly(controller, plant)) >= 1:
                failures += 1
        except DegenerateCharPoly:
            failures += 1
        if cancellation_on_or_outside_unit_circle(controller, plant, tol):
            cancellations += 1
    return SpotCheck(len(plants), failures, cancellations)
