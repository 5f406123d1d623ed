class SynthesisError(Exception):
    """Base class for every error raised by the synthesis app."""


# ─────────────────────────────────────────────
# Numeric kernels
# ─────────────────────────────────────────────

class FixedPointOverflow(SynthesisError):
    pass


class FixedPointDivisionByZero(SynthesisError, ZeroDivisionError):
    pass


class DivisorContainsZero(SynthesisError):
    """Interval division by an interval that contains 0."""


class DegenerateCharPoly(SynthesisError):
    """S(z) is the zero polynomial or has a zero leading coefficient."""


class ImproperTransferFunction(SynthesisError):
    pass


class NonpositiveSampleTime(SynthesisError):
    pass


# ─────────────────────────────────────────────
# Synthesis loop
# ─────────────────────────────────────────────

class NoCandidate(SynthesisError):
    pass


class SearchTimeout(NoCandidate):
    """The candidate search ran past the wall-clock deadline."""


class CounterexampleExtractionFailed(SynthesisError):
    pass


# ─────────────────────────────────────────────
# Simulation
# ─────────────────────────────────────────────

class ArithmeticOverflow(SynthesisError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"controller arithmetic overflow at step {step}")


class EvaluationSingularity(SynthesisError):
    pass


class DegenerateLoop(SynthesisError):
    pass


# ─────────────────────────────────────────────
# Input files
# ─────────────────────────────────────────────

class BenchmarkParseError(SynthesisError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")
