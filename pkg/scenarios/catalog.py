"""
Catalog of initial data bound to flow settings and default monitors.

Every builder is a pure function of its parameters, so the same name and
parameters give bit-identical snapshots.
"""

import inspect
import logging

import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional

from core.config import GEOMETRY_DEFAULTS
from expanders.solver import solve_graph_expander
from flow.flow_spec import BoundaryKind, FlowSpec, FlowVariant, Gauge, parse_enum
from geometry.closed_forms import (
    HyperboloidSheet, ProfileFunction, capped_profile, hyperboloid_profile, sinlog_outer,
)
from geometry.compute import compute_geometry
from geometry.representation import AnalyticParametrization, Representation, RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot
from scenarios.admissibility import AdmissibilityChecker

logger = logging.getLogger(__name__)


@dataclass
class ScenarioBundle:
    """Ready-to-run initial snapshot, flow settings and monitor names."""
    name: str
    snapshot: HypersurfaceSnapshot
    flow: FlowSpec
    monitors: List[str]
    horizon: float
    params: Dict[str, object] = field(default_factory=dict)
    metadata: Dict[str, object] = field(default_factory=dict)
    profile: Optional[ProfileFunction] = None     # Analytic initial profile, if any

    def __iter__(self) -> Iterator[object]:
        return iter((self.snapshot, self.flow, self.monitors))


def _variant(value: str) -> FlowVariant:
    return parse_enum(FlowVariant, value)


def _clock_for(variant: FlowVariant) -> Clock:
    return variant.clock


def _uniform(r_max: float, nodes: int) -> np.ndarray:
    if r_max <= 0.0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if nodes < 4:
        raise ValueError(f"Need at least 4 nodes, got {nodes}")
    return np.linspace(0.0, float(r_max), int(nodes))


# ---------------------------------------------------------------------------
# Compact controls
# ---------------------------------------------------------------------------

def circle(radius: float = 1.0, nodes: int = 256, center_x: float = 0.0, center_y: float = 0.0,
           variant: str = 'drifting_mcf', analytic: bool = False) -> ScenarioBundle:
    """Counter-clockwise circle; the flows shrink it to a point at t = R0^2 / 2."""
    if radius <= 0.0:
        raise ValueError(f"Circle radius must be positive, got {radius}")
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    center = np.array([center_x, center_y], dtype=float)
    points = center + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    param = None
    if analytic:
        param = AnalyticParametrization(
            sigma=theta,
            first=lambda s: radius * np.column_stack([-np.sin(s), np.cos(s)]),
            second=lambda s: -radius * np.column_stack([np.cos(s), np.sin(s)]),
            period=2.0 * np.pi,
            label='circle',
        )
    rep = Representation(RepresentationKind.PLANAR_CURVE, closed=True, parametrization=param)
    flow_variant = _variant(variant)
    snapshot = HypersurfaceSnapshot(rep, points, clock=_clock_for(flow_variant))
    flow = FlowSpec(variant=flow_variant, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.PERIODIC)
    return ScenarioBundle(
        name='circle', snapshot=snapshot, flow=flow,
        monitors=['density_rate', 'radius_error', 'type_iii', 'sign'],
        horizon=0.4 * radius ** 2,
        metadata={'center': center.tolist(), 'radius': radius, 'singular_time': 0.5 * radius ** 2},
    )


def offcenter_circle(radius: float = 1.0, nodes: int = 256, center_x: float = 0.5, center_y: float = 0.0,
                     variant: str = 'drifting_mcf') -> ScenarioBundle:
    """Circle away from the origin: the image shrinks like the centered one, the density sees the offset."""
    bundle = circle(radius, nodes, center_x, center_y, variant)
    bundle.name = 'offcenter_circle'
    bundle.monitors = ['density_rate', 'radius_error', 'integrated_density', 'gauge_equivalence']
    return bundle


def sphere(radius: float = 1.0, dimension: int = 2, nodes: int = 129, analytic: bool = False) -> ScenarioBundle:
    """Round sphere as a profile from the south to the north pole; R(t)^2 = R0^2 - 2 n t."""
    if radius <= 0.0:
        raise ValueError(f"Sphere radius must be positive, got {radius}")
    theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, nodes)
    points = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    points[0, 0] = points[-1, 0] = 0.0
    param = None
    if analytic:
        param = AnalyticParametrization(
            sigma=theta,
            first=lambda s: radius * np.column_stack([-np.sin(s), np.cos(s)]),
            second=lambda s: -radius * np.column_stack([np.cos(s), np.sin(s)]),
            label='sphere',
        )
    rep = Representation(RepresentationKind.REVOLUTION_PROFILE, dimension=dimension,
                         start_on_axis=True, end_on_axis=True, parametrization=param)
    snapshot = HypersurfaceSnapshot(rep, points)
    flow = FlowSpec(variant=FlowVariant.MCF, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.FIXED_DIRICHLET)
    return ScenarioBundle(
        name='sphere', snapshot=snapshot, flow=flow,
        monitors=['radius_error', 'integrated_density', 'type_iii'],
        horizon=0.4 * radius ** 2 / dimension,
        metadata={'center': [0.0, 0.0], 'radius': radius, 'singular_time': 0.5 * radius ** 2 / dimension},
    )


def line(half_length: float = 10.0, nodes: int = 201, angle: float = 0.0, offset: float = 0.0,
         variant: str = 'drifting_mcf') -> ScenarioBundle:
    """Straight line at the given angle, shifted `offset` along its normal."""
    s = np.linspace(-half_length, half_length, nodes)
    direction = np.array([np.cos(angle), np.sin(angle)])
    normal = np.array([direction[1], -direction[0]])
    points = s[:, None] * direction + offset * normal
    flow_variant = _variant(variant)
    rep = Representation(RepresentationKind.PLANAR_CURVE)
    snapshot = HypersurfaceSnapshot(rep, points, clock=_clock_for(flow_variant))
    flow = FlowSpec(variant=flow_variant, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.ASYMPTOTIC_CLAMP)
    return ScenarioBundle(
        name='line', snapshot=snapshot, flow=flow,
        monitors=['density_rate' if flow_variant.clock == Clock.T else 'normalized_density_rate',
                  'sign', 'huisken_entropy'],
        horizon=1.0,
    )


# ---------------------------------------------------------------------------
# Entire graphs and surfaces of revolution
# ---------------------------------------------------------------------------

def plane_graph(dimension: int = 2, height: float = 0.0, r_max: float = 10.0, nodes: int = 201,
                variant: str = 'normalized_drifting_mcf') -> ScenarioBundle:
    """Horizontal plane u = height as a radial graph."""
    r = _uniform(r_max, nodes)
    flow_variant = _variant(variant)
    rep = Representation(RepresentationKind.RADIAL_GRAPH, dimension=dimension, start_on_axis=True)
    snapshot = HypersurfaceSnapshot(rep, np.column_stack([r, np.full_like(r, height)]),
                                    clock=_clock_for(flow_variant))
    flow = FlowSpec(variant=flow_variant, gauge=Gauge.GRAPHICAL, boundary=BoundaryKind.ASYMPTOTIC_CLAMP)
    return ScenarioBundle(
        name='plane_graph', snapshot=snapshot, flow=flow,
        monitors=['type_iii', 'sign', 'weighted_mass'],
        horizon=1.0,
    )


def _profile_snapshot(profile: ProfileFunction, dimension: int, r_max: float, nodes: int,
                  gauge: str, analytic: bool) -> HypersurfaceSnapshot:
    r = _uniform(r_max, nodes)
    gauge = parse_enum(Gauge, gauge)
    if gauge == Gauge.GRAPHICAL:
        rep = Representation(RepresentationKind.RADIAL_GRAPH, dimension=dimension, start_on_axis=True,
                             parametrization=profile.parametrization(r) if analytic else None)
    else:
        rep = Representation(RepresentationKind.REVOLUTION_PROFILE, dimension=dimension, start_on_axis=True,
                             parametrization=profile.parametrization(r) if analytic else None)
    return HypersurfaceSnapshot(rep, profile.nodes(r), clock=Clock.S)


def _flow_for(gauge: str, profile: ProfileFunction) -> FlowSpec:
    gauge = parse_enum(Gauge, gauge)
    if gauge == Gauge.GRAPHICAL:
        return FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=gauge,
                        boundary=BoundaryKind.SCALED_FAR_FIELD, far_field=profile.value)
    return FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=gauge,
                    boundary=BoundaryKind.ASYMPTOTIC_CLAMP)


def hyperboloid(a: float = 1.0, c: float = 1.0, mu='auto', r_max: float = 20.0, nodes: int = 401,
                gauge: str = 'parametric', parametrization: str = 'graph', analytic: bool = False,
                u_max: float = 10.0) -> ScenarioBundle:
    """
    Upper sheet of the two-sheeted hyperboloid, n = 2.

    The mu-rescaled sheet x / sqrt(mu) is again a hyperboloid with
    parameters (a, c) / sqrt(mu), so the rescaling is applied to the
    closed form. mu = 'auto' picks the smallest power of two with
    mu H >= -<x0, nu> node-wise, mu = 'nondecreasing' the largest mu with
    -<x0, nu> >= mu H.

    parametrization = 'sheet' gives the (u, v) sheet away from the axis for
    closed-form comparisons; 'graph' gives z = f(r) through the axis.
    """
    if a <= 0.0 or c <= 0.0:
        raise ValueError(f"Hyperboloid needs a, c > 0, got a={a}, c={c}")
    base = hyperboloid_profile(a, c)
    trial = _profile_snapshot(base, 2, r_max, nodes, 'parametric', analytic=True)
    if mu == 'auto':
        mu_value = AdmissibilityChecker.convergent_mu(compute_geometry(trial))
        if mu_value is None:
            raise ValueError("No power of two mu satisfies mu H >= -<x0,nu> on this grid")
    elif mu == 'nondecreasing':
        mu_value = AdmissibilityChecker.nondecreasing_mu(compute_geometry(trial))
        if not 0.0 < mu_value < float('inf'):
            raise ValueError("No positive mu satisfies -<x0,nu> >= mu H on this grid")
    else:
        mu_value = float(mu)
        if mu_value <= 0.0:
            raise ValueError(f"mu must be positive, got {mu}")
    root = np.sqrt(mu_value)
    a_mu, c_mu = a / root, c / root
    profile = hyperboloid_profile(a_mu, c_mu)
    metadata = {'mu': mu_value, 'a_rescaled': a_mu, 'c_rescaled': c_mu,
                'closed_form': 'z = c sqrt(1 + r^2 / a^2)'}

    if parametrization == 'sheet':
        sheet = HyperboloidSheet(a_mu, c_mu)
        u = np.linspace(1.0 + GEOMETRY_DEFAULTS['hyperboloid_epsilon'], u_max, nodes)
        rep = Representation(RepresentationKind.REVOLUTION_PROFILE, dimension=2,
                             parametrization=sheet.parametrization(u) if analytic else None)
        snapshot = HypersurfaceSnapshot(rep, sheet.nodes(u), clock=Clock.S)
        flow = FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=Gauge.PARAMETRIC,
                        boundary=BoundaryKind.FIXED_DIRICHLET)
        metadata['sheet_parameter'] = [float(u[0]), float(u[-1])]
    elif parametrization == 'graph':
        snapshot = _profile_snapshot(profile, 2, r_max / root, nodes, gauge, analytic)
        flow = _flow_for(gauge, profile)
    else:
        raise ValueError(f"Unknown hyperboloid parametrization: {parametrization}")

    logger.info("Hyperboloid a=%g c=%g rescaled with mu=%g", a, c, mu_value)
    return ScenarioBundle(
        name='hyperboloid', snapshot=snapshot, flow=flow,
        monitors=['weighted_mass', 'deficit_vanishing', 'sign', 'factorization', 'expander_match'],
        horizon=3.0, metadata=metadata, profile=profile,
    )


# Smooth caps: even quartic matching value, f' and f'' at r = 1
EH_CAP_NOTE = 'even quartic (quintic Hermite with vanishing odd terms) matching u0, u0\', u0\'\' at r = 1'


def eh_graph(r_max: float = 20.0, nodes: int = 401, analytic: bool = False) -> ScenarioBundle:
    """u0 = |x^| sin log |x^| over R^2, capped smoothly inside |x^| <= 1."""
    profile, cap = capped_profile('eh_graph', sinlog_outer(0.0))
    snapshot = _profile_snapshot(profile, 2, r_max, nodes, 'graphical', analytic)
    return ScenarioBundle(
        name='eh_graph', snapshot=snapshot, flow=_flow_for('graphical', profile),
        monitors=['deficit_vanishing', 'type_iii', 'sign'],
        horizon=4.0, profile=profile,
        metadata={'cap': str(cap), 'cap_construction': EH_CAP_NOTE, 'outer': 'r sin(log r)'},
    )


def revolution_sinlog(r_max: float = 20.0, nodes: int = 401, gauge: str = 'graphical',
                      analytic: bool = False) -> ScenarioBundle:
    """Surface of revolution z = f(r), f = r sin log r + 6 r beyond r = 1, capped inside."""
    profile, cap = capped_profile('revolution_sinlog', sinlog_outer(6.0))
    snapshot = _profile_snapshot(profile, 2, r_max, nodes, gauge, analytic)
    return ScenarioBundle(
        name='revolution_sinlog', snapshot=snapshot, flow=_flow_for(gauge, profile),
        monitors=['deficit_vanishing', 'gradient_growth', 'type_iii', 'sign'],
        horizon=5.0, profile=profile,
        metadata={'cap': str(cap), 'cap_construction': EH_CAP_NOTE, 'outer': 'r sin(log r) + 6 r'},
    )


def expander_profile(u0: float = 1.0, dimension: int = 2, r_max: float = 10.0, tol: float = 1e-4) -> ScenarioBundle:
    """Solved graphical expander; stationary under the normalized drifting flow."""
    solved = solve_graph_expander(dimension, u0, r_max=r_max, tol=tol)
    flow = FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=Gauge.GRAPHICAL,
                    boundary=BoundaryKind.FIXED_DIRICHLET)
    return ScenarioBundle(
        name='expander_profile', snapshot=solved.snapshot(Clock.S), flow=flow,
        monitors=['weighted_mass', 'deficit_vanishing', 'sign'],
        horizon=1.0,
        metadata={'residual': solved.residual, 'slope': solved.slope,
                  'refinements': solved.metadata['refinements']},
    )


CATALOG: Dict[str, Callable[..., ScenarioBundle]] = {
    'circle': circle,
    'offcenter_circle': offcenter_circle,
    'sphere': sphere,
    'line': line,
    'plane_graph': plane_graph,
    'hyperboloid': hyperboloid,
    'eh_graph': eh_graph,
    'revolution_sinlog': revolution_sinlog,
    'expander_profile': expander_profile,
}


def scenario_parameters(name: str) -> Dict[str, object]:
    """Default parameters of a catalog entry."""
    if name not in CATALOG:
        raise ValueError(f"Unknown scenario: {name}")
    signature = inspect.signature(CATALOG[name])
    return {key: p.default for key, p in signature.parameters.items()}


def build_scenario(name: str, **params) -> ScenarioBundle:
    """
    Build a catalog entry.

    Raises:
        ValueError: unknown scenario, unknown parameter or invalid value
    """
    defaults = scenario_parameters(name)
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise ValueError(f"Unknown parameters for {name}: {', '.join(unknown)}")
    bundle = CATALOG[name](**params)
    bundle.params = {**defaults, **params}
    logger.debug("Built scenario %s with %d nodes", name, bundle.snapshot.node_count)
    return bundle
