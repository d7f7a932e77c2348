"""
Explicit RK2 time stepping for the parametric and graphical gauges.

Steps are chosen from the parabolic CFL bound, capped by max_step and by
the requested horizon. A step that produces a non-finite or degenerate
state, or moves a node further than half the minimum edge, is rejected
and retried at half the size. Accepted states are checked for the typed
termination signals.
"""

import logging

import numpy as np
from dataclasses import replace
from typing import Callable, Iterator, Optional

from core.config import FLOW_DEFAULTS
from core.errors import (
    FiniteTimeSingularity, GaugeLoss, GeometryError, MeshCollapse, StepRejected,
)
from flow.flow_spec import BoundaryKind, FlowDiagnostics, FlowSpec, FlowState, FlowVariant, Gauge
from flow.graph_equation import graph_rhs, graph_slope, graph_step_bound, uniform_spacing
from geometry.compute import compute_geometry, ensure_geometry
from geometry.snapshot import HypersurfaceSnapshot

logger = logging.getLogger(__name__)


def _diagnostics(snapshot: HypersurfaceSnapshot, step: float, max_slope: float = 0.0) -> FlowDiagnostics:
    geo = snapshot.require_geometry()
    return FlowDiagnostics(
        max_curvature_sq=float(np.max(geo.second_fundamental_sq)),
        min_edge=geo.spacing,
        last_step=float(step),
        max_slope=float(max_slope),
    )


def initial_state(snapshot: HypersurfaceSnapshot) -> FlowState:
    """Wrap a snapshot as the first state of a run; labels and x0 are attached."""
    snapshot = ensure_geometry(snapshot)
    if snapshot.labels is None or snapshot.initial_positions is None:
        snapshot = replace(
            snapshot,
            labels=np.arange(snapshot.node_count) if snapshot.labels is None else snapshot.labels,
            initial_positions=snapshot.nodes.copy() if snapshot.initial_positions is None else snapshot.initial_positions,
        )
    diagnostics = _diagnostics(snapshot, 0.0)
    initial = diagnostics.max_curvature_sq
    return FlowState(snapshot=snapshot, step=0, clock=snapshot.time, diagnostics=diagnostics,
                     curvature_scale=initial if np.isfinite(initial) and initial > 1.0 else 1.0)


# ---------------------------------------------------------------------------
# Parametric gauge
# ---------------------------------------------------------------------------

def parametric_velocity(snapshot: HypersurfaceSnapshot, variant: FlowVariant, clock: float) -> np.ndarray:
    """
    Node velocity of a flow variant from cached geometry.

    x^T is taken as x - <x, nu> nu, so the tangential drift needs no
    derivative of the projection.
    """
    geo = snapshot.require_geometry()
    x = snapshot.nodes
    nu = geo.normal
    H = geo.mean_curvature[:, None]
    if variant == FlowVariant.MCF:
        return -H * nu
    if variant == FlowVariant.DRIFTING_MCF:
        tangential = x - geo.normal_part[:, None] * nu
        return -H * nu + tangential / (2.0 * clock + 1.0)
    if variant == FlowVariant.NORMALIZED_MCF:
        return -H * nu - x
    if variant == FlowVariant.NORMALIZED_DRIFTING_MCF:
        return -(H + geo.normal_part[:, None]) * nu
    raise ValueError(f"Unknown flow variant: {variant}")


def _apply_parametric_boundary(velocity: np.ndarray, snapshot: HypersurfaceSnapshot, spec: FlowSpec) -> np.ndarray:
    rep = snapshot.representation
    velocity = velocity.copy()
    if rep.start_on_axis:
        velocity[0, 0] = 0.0
    if rep.end_on_axis:
        velocity[-1, 0] = 0.0
    for node, inner, on_axis in ((0, 1, rep.start_on_axis), (-1, -2, rep.end_on_axis)):
        if rep.closed or on_axis:
            continue
        if spec.boundary == BoundaryKind.FIXED_DIRICHLET:
            velocity[node] = 0.0
        elif spec.boundary == BoundaryKind.ASYMPTOTIC_CLAMP:
            step = 1 if node == 0 else -1
            velocity[node] = 2.0 * velocity[inner] - velocity[inner + step]
    return velocity


def _parametric_rate(snapshot: HypersurfaceSnapshot, spec: FlowSpec, clock: float) -> np.ndarray:
    return _apply_parametric_boundary(parametric_velocity(snapshot, spec.variant, clock), snapshot, spec)


def parametric_step_bound(snapshot: HypersurfaceSnapshot, spec: FlowSpec) -> float:
    """theta * h_min^2 / (2n); the rotational term near the axis carries the factor n."""
    h = snapshot.require_geometry().spacing
    return spec.cfl * h * h / (2.0 * snapshot.dimension)


def _rk2_parametric(state: FlowState, spec: FlowSpec, dt: float) -> HypersurfaceSnapshot:
    snap = state.snapshot
    t0 = state.clock
    v0 = _parametric_rate(snap, spec, t0)
    trial = compute_geometry(snap.with_nodes(snap.nodes + dt * v0, t0 + dt))
    v1 = _parametric_rate(trial, spec, t0 + dt)
    moved = snap.nodes + 0.5 * dt * (v0 + v1)
    rep = snap.representation
    if rep.start_on_axis:
        moved[0, 0] = 0.0
    if rep.end_on_axis:
        moved[-1, 0] = 0.0
    if not np.all(np.isfinite(moved)):
        raise StepRejected("non-finite node positions")
    displacement = np.max(np.linalg.norm(moved - snap.nodes, axis=1))
    if displacement > FLOW_DEFAULTS['displacement_fraction'] * snap.require_geometry().spacing:
        raise StepRejected(f"node displacement {displacement:.3g} exceeds the CFL fraction")
    return compute_geometry(snap.with_nodes(moved, t0 + dt))


def step_parametric(state: FlowState, spec: FlowSpec, horizon: Optional[float] = None) -> FlowState:
    """
    Advance all nodes by one accepted RK2 step; labels are preserved.

    Raises:
        FiniteTimeSingularity, MeshCollapse: typed termination signals
        StepRejected: no stable step found after max_halvings
    """
    if spec.gauge != Gauge.PARAMETRIC:
        raise ValueError("step_parametric called with a graphical flow spec")
    dt = _proposed_step(state, spec, parametric_step_bound(state.snapshot, spec), horizon)
    return _accept(state, spec, dt, _rk2_parametric)


# ---------------------------------------------------------------------------
# Graphical gauge
# ---------------------------------------------------------------------------

def far_field_height(spec: FlowSpec, r: np.ndarray, clock: float) -> np.ndarray:
    """Initial profile carried by the similarity scaling (or frozen on the t clock)."""
    if spec.variant.normalized:
        scale = np.exp(clock)
        return spec.far_field(r * scale) / scale
    return spec.far_field(r)


def _right_ghosts(snapshot: HypersurfaceSnapshot, spec: FlowSpec, u: np.ndarray, h: float, clock: float) -> np.ndarray:
    r_end = snapshot.nodes[-1, 0]
    offsets = np.array([1.0, 2.0])
    if spec.boundary == BoundaryKind.ASYMPTOTIC_CLAMP:
        u0 = snapshot.x0[:, 1]
        slope = (3.0 * u0[-1] - 4.0 * u0[-2] + u0[-3]) / (2.0 * h)
        return u[-1] + offsets * h * slope
    if spec.boundary == BoundaryKind.SCALED_FAR_FIELD:
        return far_field_height(spec, r_end + offsets * h, clock)
    return u[-1] + offsets * (u[-1] - u[-2])


def _graph_rate(snapshot: HypersurfaceSnapshot, spec: FlowSpec, u: np.ndarray, h: float, clock: float) -> np.ndarray:
    r = snapshot.nodes[:, 0]
    ghosts = _right_ghosts(snapshot, spec, u, h, clock)
    rate = graph_rhs(r, u, snapshot.dimension, spec.variant.normalized, ghosts, h)
    if spec.boundary in (BoundaryKind.FIXED_DIRICHLET, BoundaryKind.SCALED_FAR_FIELD):
        rate[-1] = 0.0
    return rate


def _pin_end(snapshot: HypersurfaceSnapshot, spec: FlowSpec, u: np.ndarray, clock: float) -> np.ndarray:
    if spec.boundary == BoundaryKind.SCALED_FAR_FIELD:
        u = u.copy()
        u[-1] = far_field_height(spec, snapshot.nodes[-1:, 0], clock)[0]
    return u


def graph_step_size(snapshot: HypersurfaceSnapshot, spec: FlowSpec) -> float:
    r = snapshot.nodes[:, 0]
    h = uniform_spacing(r)
    return spec.cfl * graph_step_bound(h, snapshot.dimension, float(r[-1]), spec.variant.normalized)


def _rk2_graphical(state: FlowState, spec: FlowSpec, dt: float) -> HypersurfaceSnapshot:
    snap = state.snapshot
    r = snap.nodes[:, 0]
    h = uniform_spacing(r)
    t0 = state.clock
    u = snap.nodes[:, 1]
    k0 = _graph_rate(snap, spec, u, h, t0)
    u1 = _pin_end(snap, spec, u + dt * k0, t0 + dt)
    k1 = _graph_rate(snap, spec, u1, h, t0 + dt)
    u_new = _pin_end(snap, spec, u + 0.5 * dt * (k0 + k1), t0 + dt)
    if not np.all(np.isfinite(u_new)):
        raise StepRejected("non-finite heights")
    return compute_geometry(snap.with_nodes(np.column_stack([r, u_new]), t0 + dt))


def max_graph_slope(snapshot: HypersurfaceSnapshot, spec: FlowSpec) -> float:
    r = snapshot.nodes[:, 0]
    h = uniform_spacing(r)
    u = snapshot.nodes[:, 1]
    return float(np.max(np.abs(graph_slope(u, _right_ghosts(snapshot, spec, u, h, snapshot.time), h))))


def step_graphical(state: FlowState, spec: FlowSpec, horizon: Optional[float] = None) -> FlowState:
    """
    Advance the heights of a radial graph by one accepted RK2 step.

    Raises:
        GaugeLoss: sup |u_r| exceeded the declared gradient bound
        FiniteTimeSingularity: curvature blowup
    """
    if spec.gauge != Gauge.GRAPHICAL:
        raise ValueError("step_graphical called with a parametric flow spec")
    dt = _proposed_step(state, spec, graph_step_size(state.snapshot, spec), horizon)
    new_state = _accept(state, spec, dt, _rk2_graphical)
    slope = max_graph_slope(new_state.snapshot, spec)
    new_state.diagnostics.max_slope = slope
    if slope > spec.gradient_bound:
        raise GaugeLoss(f"sup|u_r| = {slope:.4g} exceeds the bound {spec.gradient_bound:.4g}",
                        new_state.clock, vars(new_state.diagnostics))
    return new_state


# ---------------------------------------------------------------------------
# Shared step control
# ---------------------------------------------------------------------------

def _proposed_step(state: FlowState, spec: FlowSpec, bound: float, horizon: Optional[float]) -> float:
    dt = min(bound, spec.max_step)
    if horizon is not None:
        remaining = horizon - state.clock
        if remaining <= 0.0:
            raise ValueError(f"Clock {state.clock} already at or past the horizon {horizon}")
        # Land exactly on the horizon without leaving a sliver step behind
        if remaining < 1.5 * dt:
            dt = remaining if remaining <= dt else 0.5 * remaining
    return dt


def _accept(
    state: FlowState,
    spec: FlowSpec,
    dt: float,
    integrator: Callable[[FlowState, FlowSpec, float], HypersurfaceSnapshot]
) -> FlowState:
    rejected = 0
    while True:
        try:
            snapshot = integrator(state, spec, dt)
            break
        except (StepRejected, GeometryError) as exc:
            rejected += 1
            if rejected > spec.max_halvings:
                raise StepRejected(f"no stable step after {rejected - 1} halvings: {exc}")
            logger.debug("Step %.3g rejected at clock %.6g (%s); halving", dt, state.clock, exc)
            dt *= 0.5

    new_state = FlowState(
        snapshot=snapshot,
        step=state.step + 1,
        clock=snapshot.time,
        diagnostics=_diagnostics(snapshot, dt, state.diagnostics.max_slope),
        rejected_steps=state.rejected_steps + rejected,
        curvature_scale=state.curvature_scale,
    )
    _check_termination(new_state, spec)
    return new_state


def _check_termination(state: FlowState, spec: FlowSpec) -> None:
    diag = state.diagnostics
    info = vars(diag)
    ceiling = spec.curvature_ceiling * state.curvature_scale
    if not np.isfinite(diag.max_curvature_sq) or diag.max_curvature_sq > ceiling:
        raise FiniteTimeSingularity(
            f"max|A|^2 = {diag.max_curvature_sq:.4g} above the ceiling {ceiling:.4g}",
            state.clock, info)
    if diag.max_curvature_sq * diag.last_step > spec.blowup_product:
        raise FiniteTimeSingularity(
            f"max|A|^2 * step = {diag.max_curvature_sq * diag.last_step:.4g} above {spec.blowup_product:.4g}",
            state.clock, info)
    if diag.min_edge < spec.mesh_floor:
        raise MeshCollapse(f"min edge {diag.min_edge:.3g} below the floor {spec.mesh_floor:.3g}",
                           state.clock, info)


def step(state: FlowState, spec: FlowSpec, horizon: Optional[float] = None) -> FlowState:
    """Dispatch on the gauge."""
    if spec.gauge == Gauge.GRAPHICAL:
        return step_graphical(state, spec, horizon)
    return step_parametric(state, spec, horizon)


def advance(snapshot: HypersurfaceSnapshot, spec: FlowSpec, horizon: float) -> Iterator[FlowState]:
    """
    Yield the initial state and every accepted state up to the horizon.

    Termination signals propagate to the caller.
    """
    spec.validate(snapshot)
    state = initial_state(snapshot)
    yield state
    max_steps = FLOW_DEFAULTS['max_steps']
    while state.clock < horizon - 1e-14 * max(1.0, abs(horizon)):
        if state.step >= max_steps:
            raise StepRejected(f"step limit of {max_steps} reached at clock {state.clock:.6g}")
        state = step(state, spec, horizon)
        yield state


def evolve(snapshot: HypersurfaceSnapshot, spec: FlowSpec, horizon: float) -> FlowState:
    """Run to the horizon and return the final state."""
    state = None
    for state in advance(snapshot, spec, horizon):
        pass
    return state
