"""
Synthesis and verification reports.

A report is a plain dict (JSON-ready, ``format_version`` 1). The text
rendering lists the same fields as flattened ``key = value`` lines.
"""
import json
import logging
import math

from .cegis import Limits, cegis_one_stage, cegis_two_stage, soundness_spot_check
from .exceptions import ArithmeticOverflow, DegenerateCharPoly, DegenerateLoop, EvaluationSingularity
from .simulate import frequency_margins, step_response
from .stability import JuryStatus, jury_stable, jury_stable_interval, root_oracle
from .transfer import cancellation_on_or_outside_unit_circle, char_poly, family_char_poly

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
ENGINES = {
    'two': ('two-stage', cegis_two_stage),
    'one': ('one-stage', cegis_one_stage),
}


def controller_as_dict(controller):
    def coefficients(values):
        return [{'decimal': c.to_decimal(), 'raw': c.raw} for c in values]

    return {
        'format': str(controller.format),
        'num': coefficients(controller.num),
        'den': coefficients(controller.den),
    }


def _number(x):
    """JSON has no infinity; margins without a crossover are reported as 'inf'."""
    if x is None:
        return None
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    return round(x, 6)


def _engine(name):
    key = name.split('-')[0]
    if key not in ENGINES:
        raise ValueError(f"unknown engine {name!r}, expected 'two' or 'one'")
    return ENGINES[key]


# ─────────────────────────────────────────────
# synth
# ─────────────────────────────────────────────

def run_synthesis(spec, engine='two', seed=0, limits=None, oracle_samples=1000, omit_timing=False):
    label, run = _engine(engine)
    limits = limits or Limits()
    family = spec.family
    logger.info("synthesizing %s with the %s engine (seed %d)", spec.name, label, seed)
    result = run(family, spec.controller_format, spec.controller_orders, seed, limits, spec.plant_format)

    report = {
        'format_version': FORMAT_VERSION,
        'kind': 'synth',
        'benchmark': spec.as_dict(),
        'engine': label,
        'seed': seed,
        'outcome': result.outcome,
        'reason': result.reason.value if result.reason else None,
        'iterations': result.iterations,
        'plant_format': str(result.plant_format),
        'controller': None,
        'certificate': None,
        'oracle': None,
        'interval_checks': result.interval_checks,
        'transcript': [record.as_dict() for record in result.transcript],
    }
    if result.success:
        report['controller'] = controller_as_dict(result.controller)
        report['certificate'] = result.certificate.as_dict()
        spot = soundness_spot_check(result.controller, family.with_format(result.plant_format),
                                    oracle_samples, seed)
        report['oracle'] = spot.as_dict()
    if not omit_timing:
        report['wall_time_s'] = round(result.wall_time, 3)
    return report


# ─────────────────────────────────────────────
# verify
# ─────────────────────────────────────────────

def _trace_summary(controller, spec, steps, trace_out):
    sample_time = spec.sample_time or 1
    try:
        trace = step_response(controller, spec.plant, sample_time, steps)
    except ArithmeticOverflow as exc:
        return {'steps': steps, 'overflow_at': exc.step, 'diverged_at': None, 'max_abs_output': None}
    except DegenerateLoop as exc:
        return {'steps': 0, 'overflow_at': None, 'diverged_at': None, 'max_abs_output': None,
                'error': str(exc)}
    if trace_out:
        with open(trace_out, 'w', encoding='utf-8') as fh:
            fh.write(trace.to_csv())
    return {
        'steps': len(trace),
        'overflow_at': None,
        'diverged_at': trace.diverged_at,
        'max_abs_output': _number(float(trace.max_abs_output())),
    }


def run_verify(spec, controller, steps=500, trace_out=None, cancellation_tol=1e-6):
    family = spec.family
    report = {
        'format_version': FORMAT_VERSION,
        'kind': 'verify',
        'benchmark': spec.as_dict(),
        'controller': controller_as_dict(controller),
    }

    try:
        S = char_poly(controller, spec.plant)
        nominal = jury_stable(S)
        report['jury'] = nominal.as_dict()
        report['max_root_modulus'] = _number(root_oracle(S))
    except DegenerateCharPoly as exc:
        nominal = None
        report['jury'] = {'status': JuryStatus.UNSTABLE.value, 'violated': None, 'margin': None,
                          'error': str(exc)}
        report['max_root_modulus'] = None

    try:
        interval = jury_stable_interval(family_char_poly(controller, family, inflate=True))
        report['interval'] = interval.as_dict()
    except DegenerateCharPoly:
        interval = None
        report['interval'] = {'status': JuryStatus.UNKNOWN.value, 'violated': None, 'margin': None}

    cancelled = cancellation_on_or_outside_unit_circle(controller, spec.plant, cancellation_tol)
    report['cancellation'] = cancelled

    if nominal is None or not nominal.stable or cancelled:
        verdict = JuryStatus.UNSTABLE
    elif interval is not None and interval.stable:
        verdict = JuryStatus.STABLE
    else:
        verdict = JuryStatus.UNKNOWN
    report['verdict'] = verdict.value

    try:
        margins = frequency_margins(controller, spec.plant, spec.sample_time or 1)
        report['margins'] = {k: _number(v) for k, v in margins.as_dict().items()}
    except EvaluationSingularity as exc:
        report['margins'] = {'error': str(exc)}

    report['trace'] = _trace_summary(controller, spec, steps, trace_out)
    logger.info("verify %s: %s", spec.name, verdict.value)
    return report


# ─────────────────────────────────────────────
# Rendering
# ─────────────────────────────────────────────

def exit_code(report):
    if report['kind'] == 'synth':
        return 0 if report['outcome'] == 'Success' else 1
    return 0 if report['verdict'] == JuryStatus.STABLE.value else 1


def render_json(report):
    return json.dumps(report, indent=2) + "\n"


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else key, item, out)
    elif isinstance(value, list):
        if not value:
            out.append(f"{prefix} = []")
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, out)
    else:
        out.append(f"{prefix} = {'null' if value is None else value}")


def render_text(report):
    lines = []
    _flatten('', report, lines)
    return "\n".join(lines) + "\n"


def render(report, style='json'):
    return render_text(report) if style == 'text' else render_json(report)
