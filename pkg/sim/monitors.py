"""
Run-level monitors.

A monitor turns the sampled snapshots of one run into a single verdict
with its worst violation, details for the report and optional series for
CSV export. Monitors are registered by name; their keyword parameters are
the keys accepted in a `[monitor.<name>]` configuration section.
"""

import inspect
import logging

import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from core.config import SOLVER_DEFAULTS, TOLERANCES
from core.errors import FlowTermination, LabError, MonitorError
from expanders.solver import compare_to_expander, solve_graph_expander
from flow.engine import max_graph_slope
from flow.equivalence import run_equivalence
from flow.flow_spec import FlowSpec, Gauge
from functionals.integrals import (
    area_in_ball, custom_weight_admissibility, expander_deficit, huisken_entropy, initial_mass,
    integrated_density, integrated_density_defect, truncation_sensitivity, volume_growth_exponent,
    weighted_mass, weighted_residual_sup, window_radius,
)
from functionals.monitors import sign_monitors
from functionals.pointwise import (
    PointwiseRateSeries, area_element_rate, factorization_rate, normalized_density_rate,
    pointwise_density_rate, position_growth_rate,
)
from functionals.verdicts import (
    Direction, FunctionalSeries, Verdict, deficit_vanishing_check, exponential_rate,
    monotonicity_verdict, slope_identity_mismatch,
)
from functionals.weights import WeightChoice, WeightKind
from geometry.closed_forms import (
    circle_density_log_rate, rescaled_circle_log_rate, rescaled_circle_radius, shrinking_sphere_radius,
)
from geometry.compute import expander_residual
from geometry.representation import RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot
from scenarios.catalog import ScenarioBundle

logger = logging.getLogger(__name__)


@dataclass
class MonitorContext:
    """What a monitor may know about the run besides its samples."""
    bundle: ScenarioBundle
    spec: FlowSpec
    horizon: float
    termination: Optional[FlowTermination] = None

    @property
    def metadata(self) -> Dict[str, object]:
        return self.bundle.metadata


@dataclass
class MonitorOutcome:
    """Verdict of one monitor."""
    name: str
    verdict: Verdict
    value: Optional[float] = None              # Headline quantity (error, mismatch, ratio, ...)
    worst_violation: Optional[float] = None
    worst_clock: Optional[float] = None
    details: Dict[str, object] = field(default_factory=dict)
    series: Dict[str, FunctionalSeries] = field(default_factory=dict)
    note: str = ''

    def to_dict(self) -> Dict[str, object]:
        return {
            'verdict': self.verdict.value,
            'value': self.value,
            'worst_violation': self.worst_violation,
            'worst_clock': self.worst_clock,
            'details': self.details,
            'series': sorted(self.series),
            'note': self.note,
        }


MonitorFunction = Callable[..., MonitorOutcome]
MONITORS: Dict[str, MonitorFunction] = {}


def monitor(name: str) -> Callable[[MonitorFunction], MonitorFunction]:
    def register(fn: MonitorFunction) -> MonitorFunction:
        MONITORS[name] = fn
        return fn
    return register


def monitor_parameters(name: str) -> Dict[str, object]:
    """Keyword parameters of a monitor with their defaults."""
    if name not in MONITORS:
        raise ValueError(f"Unknown monitor: {name}")
    signature = inspect.signature(MONITORS[name])
    return {key: p.default for key, p in list(signature.parameters.items())[2:]}


def evaluate_monitor(name: str, samples: Sequence[HypersurfaceSnapshot], context: MonitorContext,
                     params: Optional[Dict[str, object]] = None) -> MonitorOutcome:
    """
    Run one monitor; a monitor that cannot decide yields INCONCLUSIVE.

    Raises:
        ValueError: unknown monitor or parameter
    """
    params = dict(params or {})
    unknown = sorted(set(params) - set(monitor_parameters(name)))
    if unknown:
        raise ValueError(f"Unknown parameters for monitor {name}: {', '.join(unknown)}")
    try:
        outcome = MONITORS[name](list(samples), context, **params)
    except LabError as exc:
        logger.warning("Monitor %s inconclusive: %s", name, exc)
        return MonitorOutcome(name, Verdict.INCONCLUSIVE, note=str(exc))
    logger.info("Monitor %s: %s (value %s)", name, outcome.verdict.value,
                'n/a' if outcome.value is None else f"{outcome.value:.4g}")
    return outcome


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _as_list(value) -> List:
    if value is None:
        return []
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _up_to(samples: Sequence[HypersurfaceSnapshot], clock_max: Optional[float]) -> List[HypersurfaceSnapshot]:
    if clock_max is None:
        return list(samples)
    return [snap for snap in samples if snap.time <= clock_max + 1e-12]


def _labels_near(snapshot: HypersurfaceSnapshot, radii: Sequence[float]) -> List[int]:
    """Labels of the nodes whose initial radial coordinate is closest to each radius."""
    r0 = np.abs(snapshot.x0[:, 0])
    labels = snapshot.labels if snapshot.labels is not None else np.arange(snapshot.node_count)
    return [int(labels[int(np.argmin(np.abs(r0 - radius)))]) for radius in radii]


def _slack(snapshot: HypersurfaceSnapshot) -> float:
    return TOLERANCES['sign_slack_factor'] * snapshot.require_geometry().spacing ** 2


def _rate_outcome(name: str, rates: Sequence[PointwiseRateSeries], tol: float,
                  details: Optional[Dict[str, object]] = None) -> MonitorOutcome:
    details = dict(details or {})
    mismatches = {f"label_{rate.label}": rate.relative_mismatch for rate in rates}
    worst = max(mismatches.values())
    # The closed-form comparison, when there is one, is held to the same tolerance
    worst = max(worst, float(details.get('closed_form_mismatch', 0.0)))
    series: Dict[str, FunctionalSeries] = {}
    for rate in rates:
        values = FunctionalSeries(f"{name}_label{rate.label}")
        for clock, value in zip(rate.clocks, rate.values):
            values.append(clock, value)
        series[f"label{rate.label}"] = values
    return MonitorOutcome(
        name, Verdict.PASS if worst <= tol else Verdict.FAIL, value=worst, worst_violation=worst,
        details={'mismatch': mismatches, 'tolerance': tol, **details}, series=series,
    )


def _is_centered_circle(context: MonitorContext) -> bool:
    center = context.metadata.get('center')
    return (context.bundle.name == 'circle' and center is not None
            and np.allclose(center, 0.0) and context.bundle.snapshot.dimension == 1)


def _closed_form_log_mismatch(rates: Sequence[PointwiseRateSeries], expected: Callable[[np.ndarray], np.ndarray]) -> float:
    worst = 0.0
    for rate in rates:
        predicted = expected(rate.clocks)
        measured = rate.measured / rate.values
        worst = max(worst, float(np.max(np.abs(measured - predicted)) / np.max(np.abs(predicted))))
    return worst


# ---------------------------------------------------------------------------
# Pointwise identities
# ---------------------------------------------------------------------------

@monitor('density_rate')
def density_rate(samples, context, labels=None, t_max=None, tol=None) -> MonitorOutcome:
    """Rate of rho dmu per material point under drifting MCF against -(H + <x,nu>/(2t+1))^2 rho dmu."""
    tol = TOLERANCES['tol_pointwise'] if tol is None else tol
    window = _up_to(samples, t_max)
    labels = _as_list(labels) or [0, samples[0].node_count // 4]
    rates = [pointwise_density_rate(window, label) for label in labels]
    details = {}
    if _is_centered_circle(context):
        r0 = float(context.metadata['radius'])
        details['closed_form_mismatch'] = _closed_form_log_mismatch(
            rates, lambda t: circle_density_log_rate(t, r0))
    return _rate_outcome('density_rate', rates, tol, details)


@monitor('normalized_density_rate')
def normalized_density(samples, context, labels=None, s_max=None, tol=None) -> MonitorOutcome:
    """Rate of e^{|x~|^2/2} dmu~ per material point against -(H~ + <x~,nu~>)^2 e^{|x~|^2/2} dmu~."""
    tol = TOLERANCES['tol_pointwise'] if tol is None else tol
    window = _up_to(samples, s_max)
    labels = _as_list(labels) or [0, samples[0].node_count // 4]
    rates = [normalized_density_rate(window, label) for label in labels]
    details = {}
    if _is_centered_circle(context):
        r0 = float(context.metadata['radius'])
        details['closed_form_mismatch'] = _closed_form_log_mismatch(
            rates, lambda s: rescaled_circle_log_rate(s, r0))
    return _rate_outcome('normalized_density_rate', rates, tol, details)


@monitor('factorization')
def factorization(samples, context, radii=(1.0, 2.0), s_max=None, tol=None) -> MonitorOutcome:
    """
    Rate of e^{-|x~|^2/2} dmu~ and of dmu~ per material point, checked
    against (<x~,nu~> - H~)(<x~,nu~> + H~) e^{-|x~|^2/2} dmu~ and
    -H~ (H~ + <x~,nu~>) dmu~.
    """
    tol = TOLERANCES['tol_pointwise'] if tol is None else tol
    window = _up_to(samples, s_max)
    labels = _labels_near(window[0], _as_list(radii))
    rates = [factorization_rate(window, label) for label in labels]
    area_rates = [area_element_rate(window, label) for label in labels]
    outcome = _rate_outcome('factorization', rates, tol)
    area_worst = max(rate.relative_mismatch for rate in area_rates)
    outcome.details['area_element_mismatch'] = area_worst
    minimum = min(float(np.min(rate.predicted / rate.values)) for rate in rates)
    outcome.details['min_log_rate'] = minimum
    if area_worst > tol:
        outcome.verdict = Verdict.FAIL
        outcome.worst_violation = max(outcome.worst_violation, area_worst)
    return outcome


@monitor('position_growth')
def position_growth(samples, context, radii=(1.0, 2.0), s_max=None, tol=None,
                    nondecreasing=True) -> MonitorOutcome:
    """Rate of |x~|^2 per material point and, in the sign-preserving regime, its monotonicity."""
    tol = TOLERANCES['tol_pointwise'] if tol is None else tol
    window = _up_to(samples, s_max)
    labels = _labels_near(window[0], _as_list(radii))
    rates = [position_growth_rate(window, label) for label in labels]
    outcome = _rate_outcome('position_growth', rates, tol)
    if nondecreasing:
        for rate in rates:
            series = outcome.series[f"label{rate.label}"]
            result = monotonicity_verdict(series, Direction.NON_DECREASING)
            outcome.details[f"monotone_label_{rate.label}"] = result.to_dict()
            if result.verdict == Verdict.FAIL:
                outcome.verdict = Verdict.FAIL
    return outcome


# ---------------------------------------------------------------------------
# Integral monitors
# ---------------------------------------------------------------------------

def _integral_series(name: str, samples, evaluate, weight_name: str = 'unit') -> FunctionalSeries:
    series = FunctionalSeries(name, weight=weight_name)
    for snap in samples:
        result = evaluate(snap)
        series.append(snap.time, result.value, result.truncation, result.excluded_fraction)
    return series


@monitor('weighted_mass')
def weighted_mass_monitor(samples, context, weight='normalized_expander_density*initial_gaussian',
                          truncation=None, direction='non_increasing', tol=None,
                          slope_tol=None) -> MonitorOutcome:
    """
    Weighted mass and deficit series: monotonicity, slope identity
    d/ds mass = -deficit, initial value against C0 and truncation sensitivity.
    `weight` may be a WeightChoice carrying tabulated custom values.
    """
    tol = TOLERANCES['tol_mono'] if tol is None else tol
    slope_tol = TOLERANCES['tol_slope'] if slope_tol is None else slope_tol
    choice = weight if isinstance(weight, WeightChoice) else WeightChoice.parse(weight)
    mass = _integral_series('weighted_mass', samples, lambda s: weighted_mass(s, choice, truncation), choice.name)
    deficit = _integral_series('expander_deficit', samples,
                               lambda s: expander_deficit(s, choice, truncation), choice.name)

    result = monotonicity_verdict(mass, Direction(direction), tol)
    details: Dict[str, object] = {'monotonicity': result.to_dict(), 'weight': choice.name,
                                  'truncation': truncation}
    verdict = result.verdict

    slope = slope_identity_mismatch(mass, deficit)
    details['slope_mismatch'] = slope
    if slope > slope_tol:
        verdict = Verdict.FAIL

    first = samples[0]
    if WeightKind.CUSTOM in choice.factors:
        admissibility = custom_weight_admissibility(first, choice.custom, truncation)
        details['custom_weight_admissibility'] = admissibility.value
        if not np.isfinite(admissibility.value) or admissibility.excluded_nodes:
            verdict = Verdict.FAIL
    if choice == WeightChoice.relative_mass() and first.time == 0.0:
        c0 = initial_mass(first, truncation).value
        details['initial_mass'] = c0
        details['initial_mass_defect'] = abs(mass.values[0] - c0) / max(abs(c0), np.finfo(float).tiny)
        details['bounded_by_initial_mass'] = bool(np.all(mass.value_array <= c0 * (1.0 + tol)))
        if not details['bounded_by_initial_mass']:
            verdict = Verdict.FAIL

    last = samples[-1]
    reach = float(np.sqrt(np.max(last.radius_sq)))
    inner = 0.5 * reach if truncation is None else float(truncation)
    if 2.0 * inner <= reach + 1e-12:
        sensitivity = truncation_sensitivity(last, choice, inner)
        details['truncation_sensitivity'] = sensitivity
        if sensitivity > TOLERANCES['truncation_sensitivity']:
            logger.warning("Weighted mass changes by %.3g between R=%.4g and 2R", sensitivity, inner)
            verdict = Verdict.FAIL
    if mass.flagged and verdict == Verdict.PASS:
        verdict = Verdict.INCONCLUSIVE

    return MonitorOutcome('weighted_mass', verdict, value=result.worst_violation,
                          worst_violation=result.worst_violation, worst_clock=result.worst_clock,
                          details=details, series={'mass': mass, 'deficit': deficit})


@monitor('integrated_density')
def integrated_density_monitor(samples, context, truncation=None, tol=None) -> MonitorOutcome:
    """Integral of rho dmu on the t clock, non-increasing on closed hypersurfaces."""
    if samples[0].clock != Clock.T:
        raise MonitorError("integrated_density lives on the t clock")
    series = _integral_series('integrated_density', samples, lambda s: integrated_density(s, truncation),
                              WeightKind.EXPANDER_DENSITY.value)
    result = monotonicity_verdict(series, Direction.NON_INCREASING, tol)
    details: Dict[str, object] = {'monotonicity': result.to_dict()}
    if samples[0].representation.closed:
        details['defect_integral'] = integrated_density_defect(samples[0], truncation).value
    return MonitorOutcome('integrated_density', result.verdict, value=series.values[-1],
                          worst_violation=result.worst_violation, worst_clock=result.worst_clock,
                          details=details, series={'value': series})


@monitor('huisken_entropy')
def huisken_entropy_monitor(samples, context, reference_time=None, expected=None,
                            expected_tol=1e-5, tol=None) -> MonitorOutcome:
    """
    Gaussian density centered at (0, T); non-increasing under MCF, constant
    on shrinkers. T defaults to the singular time when known, else the
    horizon plus one.
    """
    if samples[0].clock != Clock.T:
        raise MonitorError("huisken_entropy lives on the t clock")
    if reference_time is None:
        reference_time = context.metadata.get('singular_time', context.horizon + 1.0)
    window = [snap for snap in samples if snap.time < reference_time]
    series = _integral_series('huisken_entropy', window, lambda s: huisken_entropy(s, reference_time))
    result = monotonicity_verdict(series, Direction.NON_INCREASING, tol)
    values = series.value_array
    details = {'monotonicity': result.to_dict(), 'reference_time': reference_time,
               'drift': float(np.max(values) - np.min(values))}
    verdict = result.verdict
    if expected is not None:
        deviation = float(np.max(np.abs(values - expected)))
        details['deviation'] = deviation
        if deviation > expected_tol:
            verdict = Verdict.FAIL
    return MonitorOutcome('huisken_entropy', verdict, value=float(values[-1]),
                          worst_violation=result.worst_violation, worst_clock=result.worst_clock,
                          details=details, series={'value': series})


@monitor('deficit_vanishing')
def deficit_vanishing(samples, context, weight='unit', truncation=5.0, window=None,
                      annulus_inner=1.0, annulus_outer=5.0, floor=None, ratio=None,
                      measure='distance') -> MonitorOutcome:
    """
    Weighted deficit on |x~| <= truncation dies out along the run; with a
    floor, the sup of |H~ + <x~,nu~>| over the annulus must also drop below it.
    `measure = axis` measures the window and annulus in r, for surfaces
    whose axis point sits far from the origin.
    """
    if samples[0].clock != Clock.S:
        raise MonitorError("deficit_vanishing needs a normalized run on the s clock")
    choice = WeightChoice.parse(weight)
    deficit = _integral_series('expander_deficit', samples,
                               lambda s: expander_deficit(s, choice, truncation, measure), choice.name)
    annulus = FunctionalSeries('annulus_residual')
    for snap in samples:
        radius = window_radius(snap, measure)
        inside = (radius >= annulus_inner) & (radius <= annulus_outer)
        if not np.any(inside):
            raise MonitorError(f"No nodes in the annulus {annulus_inner} <= |x| <= {annulus_outer}")
        annulus.append(snap.time, float(np.max(expander_residual(snap)[inside])), annulus_outer)

    result = deficit_vanishing_check(deficit, window, annulus if floor is not None else None, floor, ratio)
    return MonitorOutcome('deficit_vanishing', result.verdict, value=result.ratio,
                          details=result.to_dict(), series={'deficit': deficit, 'annulus': annulus})


@monitor('area_growth')
def area_growth(samples, context, radii=(1.0, 2.0, 4.0, 8.0)) -> MonitorOutcome:
    """area(M~ in B_R) <= C0 e^{R^2/2} on every sample, and the volume growth exponent at the end."""
    radii = [float(r) for r in _as_list(radii)]
    c0 = initial_mass(samples[0]).value
    worst = -np.inf
    worst_clock = None
    for snap in samples:
        for radius in radii:
            ratio = area_in_ball(snap, radius) / (c0 * np.exp(0.5 * radius ** 2))
            if ratio > worst:
                worst, worst_clock = ratio, snap.time
    exponent, constant = volume_growth_exponent(samples[-1], radii)
    verdict = Verdict.PASS if worst <= 1.0 else Verdict.FAIL
    return MonitorOutcome('area_growth', verdict, value=float(worst), worst_violation=float(max(worst - 1.0, 0.0)),
                          worst_clock=worst_clock,
                          details={'initial_mass': c0, 'growth_exponent': exponent, 'growth_constant': constant})


@monitor('weighted_residual')
def weighted_residual(samples, context, alpha=1.0, epsilon=0.5, truncation=None,
                      expect_decay=True) -> MonitorOutcome:
    """sup |H + <x,nu>|^2 V^2 / (1 + alpha |x|^2)^{1 - epsilon} with an exponential rate fit."""
    series = FunctionalSeries('weighted_residual')
    for snap in samples:
        series.append(snap.time, weighted_residual_sup(snap, alpha, epsilon, truncation))
    rate, amplitude = exponential_rate(series)
    verdict = Verdict.PASS if (rate > 0.0 or not expect_decay) else Verdict.FAIL
    return MonitorOutcome('weighted_residual', verdict, value=rate,
                          details={'decay_rate': rate, 'amplitude': amplitude}, series={'value': series})


# ---------------------------------------------------------------------------
# Geometric monitors
# ---------------------------------------------------------------------------

SIGN_CHECKS = {
    'residual_nonnegative': lambda record, slack: -record.min_residual - slack,
    'normal_nonpositive': lambda record, slack: record.max_normal_part - slack,
    'mean_convex': lambda record, slack: -record.min_mean_curvature - slack,
    'factorization_nonnegative': lambda record, slack: -record.min_factorization - slack,
}


@monitor('sign')
def sign(samples, context, require=None, window=None, trim_ends=2) -> MonitorOutcome:
    """
    Node-wise sign records on every sample. Each required check may be
    violated by at most sign_slack_factor * h^2.
    """
    checks = [str(name) for name in _as_list(require)]
    unknown = sorted(set(checks) - set(SIGN_CHECKS))
    if unknown:
        raise ValueError(f"Unknown sign checks: {', '.join(unknown)}")
    worst = 0.0
    worst_clock = None
    failed: List[str] = []
    extremes: Dict[str, FunctionalSeries] = {
        key: FunctionalSeries(f"sign_{key}") for key in ('min_residual', 'max_normal_part', 'min_mean_curvature')
    }
    for snap in samples:
        record = sign_monitors(snap, window, int(trim_ends))
        slack = _slack(snap)
        for key, series in extremes.items():
            series.append(snap.time, getattr(record, key))
        for name in checks:
            excess = SIGN_CHECKS[name](record, slack)
            if excess > 0.0 and name not in failed:
                failed.append(name)
            if excess > worst:
                worst, worst_clock = excess, snap.time
    verdict = Verdict.FAIL if failed else Verdict.PASS
    details = {
        'checks': checks,
        'failed': failed,
        'min_residual': min(extremes['min_residual'].values),
        'max_normal_part': max(extremes['max_normal_part'].values),
        'min_mean_curvature': min(extremes['min_mean_curvature'].values),
    }
    return MonitorOutcome('sign', verdict, value=worst, worst_violation=worst, worst_clock=worst_clock,
                          details=details, series=extremes)


@monitor('type_iii')
def type_iii(samples, context, bound=10.0) -> MonitorOutcome:
    """
    t max|A|^2 in physical time stays below `bound`; for a run ending in a
    finite-time singularity at T, (T - t) max|A|^2 is checked instead.
    """
    singular = context.termination is not None and context.termination.signal == 'FiniteTimeSingularity'
    series = FunctionalSeries('type_iii')
    for snap in samples:
        record = sign_monitors(snap)
        if singular:
            if snap.clock != Clock.T:
                raise MonitorError("Singular-time control needs the t clock")
            reference = float(context.metadata.get('singular_time', context.termination.clock))
            if snap.time >= reference:
                continue
            value = (reference - snap.time) * float(np.max(snap.require_geometry().second_fundamental_sq))
        else:
            value = record.type_iii
        series.append(snap.time, value)
    if len(series) == 0:
        raise MonitorError("No samples before the singular time")
    values = series.value_array
    worst_index = int(np.argmax(values))
    verdict = Verdict.PASS if values[worst_index] <= bound else Verdict.FAIL
    return MonitorOutcome('type_iii', verdict, value=float(values[worst_index]),
                          worst_violation=float(max(values[worst_index] - bound, 0.0)),
                          worst_clock=series.clocks[worst_index],
                          details={'bound': bound, 'mode': 'singular' if singular else 'immortal'},
                          series={'value': series})


@monitor('gradient_growth')
def gradient_growth(samples, context, margin=1.0) -> MonitorOutcome:
    """
    sup |u_r| of every sample of a graphical run stays within
    sup |u0'| + margin, u0' taken from the analytic profile when known.
    """
    if context.spec.gauge != Gauge.GRAPHICAL:
        raise MonitorError("gradient_growth needs a graphical-gauge run")
    profile = context.bundle.profile
    if profile is not None:
        initial = float(np.max(np.abs(profile.first(samples[0].x0[:, 0]))))
    else:
        initial = max_graph_slope(samples[0], context.spec)
    bound = initial + margin
    series = FunctionalSeries('max_slope')
    for snap in samples:
        series.append(snap.time, max_graph_slope(snap, context.spec))
    values = series.value_array
    worst_index = int(np.argmax(values))
    worst = float(values[worst_index])
    return MonitorOutcome('gradient_growth', Verdict.PASS if worst <= bound else Verdict.FAIL, value=worst,
                          worst_violation=max(worst - bound, 0.0), worst_clock=series.clocks[worst_index],
                          details={'initial_slope': initial, 'bound': bound}, series={'value': series})


@monitor('radius_error')
def radius_error(samples, context, t_max=None, tol=1e-2) -> MonitorOutcome:
    """Mean distance to the center against the closed-form radius of a shrinking circle or sphere."""
    metadata = context.metadata
    if 'radius' not in metadata or 'center' not in metadata:
        raise MonitorError("radius_error needs a circle or sphere scenario")
    r0 = float(metadata['radius'])
    center = np.asarray(metadata['center'], dtype=float)
    dimension = samples[0].dimension
    series = FunctionalSeries('radius_error')
    for snap in _up_to(samples, t_max):
        measured = float(np.mean(np.linalg.norm(snap.nodes - center, axis=1)))
        if snap.clock == Clock.T:
            exact = float(shrinking_sphere_radius(snap.time, r0, dimension))
        else:
            if dimension != 1 or not np.allclose(center, 0.0):
                raise MonitorError("Rescaled radius closed form covers the centered circle only")
            exact = float(rescaled_circle_radius(snap.time, r0))
        series.append(snap.time, abs(measured - exact) / exact)
    values = series.value_array
    worst_index = int(np.argmax(values))
    worst = float(values[worst_index])
    return MonitorOutcome('radius_error', Verdict.PASS if worst <= tol else Verdict.FAIL, value=worst,
                          worst_violation=worst, worst_clock=series.clocks[worst_index],
                          details={'tolerance': tol, 'spacing': samples[0].require_geometry().spacing},
                          series={'value': series})


@monitor('expander_match')
def expander_match(samples, context, window=5.0, tol=1e-2, r_max=SOLVER_DEFAULTS['r_max'],
                   solver_tol=SOLVER_DEFAULTS['tol']) -> MonitorOutcome:
    """
    Final snapshot against the graphical expander with the same height on the axis.
    """
    final = samples[-1]
    height = float(final.nodes[0, 1])
    if abs(final.nodes[0, 0]) > 1e-12:
        raise MonitorError("expander_match needs a snapshot that starts on the axis")
    profile = solve_graph_expander(final.dimension, height, r_max=r_max, tol=solver_tol)
    distance = compare_to_expander(final, profile, window)
    return MonitorOutcome('expander_match', Verdict.PASS if distance <= tol else Verdict.FAIL, value=distance,
                          worst_violation=distance, worst_clock=final.time,
                          details={'initial_height': height, 'window': window, 'tolerance': tol,
                                   'profile_slope': profile.slope, 'profile_residual': profile.residual})


@monitor('gauge_equivalence')
def gauge_equivalence(samples, context, horizon=None, tol=0.6) -> MonitorOutcome:
    """
    Rerun the initial data under MCF and drifting MCF and compare the images.

    `tol` is a fraction of the mean edge length of the MCF run.
    """
    initial = samples[0]
    if initial.kind == RepresentationKind.RADIAL_GRAPH or initial.clock != Clock.T:
        raise MonitorError("gauge_equivalence needs parametric data on the t clock")
    horizon = 0.25 * context.horizon if horizon is None else float(horizon)
    distance, mean_edge = run_equivalence(initial, context.spec, horizon)
    relative = distance / mean_edge
    return MonitorOutcome('gauge_equivalence', Verdict.PASS if relative <= tol else Verdict.FAIL,
                          value=relative, worst_violation=max(relative - tol, 0.0), worst_clock=horizon,
                          details={'distance': distance, 'mean_edge': mean_edge, 'horizon': horizon})
