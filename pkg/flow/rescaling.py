"""
Parabolic rescaling x_mu = mu^{-1/2} (x(., mu t) - q0) and similarity variables.
"""

import numpy as np
from dataclasses import replace
from typing import Sequence, Union

from geometry.representation import Representation
from geometry.snapshot import Clock, GeometryCache, HypersurfaceSnapshot

Point = Union[Sequence[float], np.ndarray]


def _center(snapshot: HypersurfaceSnapshot, q0: Point) -> np.ndarray:
    q0 = np.zeros(2) if q0 is None else np.asarray(q0, dtype=float).reshape(2)
    if snapshot.representation.is_rotational and q0[0] != 0.0:
        raise ValueError(f"Rescaling center must lie on the rotation axis, got r = {q0[0]}")
    return q0


def mu_rescale(snapshot: HypersurfaceSnapshot, mu: float, q0: Point = None) -> HypersurfaceSnapshot:
    """
    Parabolic rescaling of a snapshot about q0.

    Positions map to mu^{-1/2}(x - q0) and t to t / mu. A cached geometry is
    transformed in place of recomputation: H -> mu^{1/2} H,
    |A|^2 -> mu |A|^2, dmu -> mu^{-n/2} dmu, normals unchanged.

    Args:
        snapshot: Snapshot on either clock (only the t clock is rescaled)
        mu: Positive scale
        q0: Center, on the axis for rotational representations

    Returns:
        Rescaled snapshot
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    q0 = _center(snapshot, q0)
    root = np.sqrt(mu)
    nodes = (snapshot.nodes - q0) / root
    x0 = None if snapshot.initial_positions is None else (snapshot.initial_positions - q0) / root
    time = snapshot.time / mu if snapshot.clock == Clock.T else snapshot.time

    geometry = None
    geo = snapshot.geometry
    if geo is not None:
        normal_part = np.sum(nodes * geo.normal, axis=1)
        tangential = nodes - normal_part[:, None] * geo.normal
        geometry = GeometryCache(
            tangent=geo.tangent,
            normal=geo.normal,
            profile_curvature=geo.profile_curvature * root,
            rotational_curvature=geo.rotational_curvature * root,
            mean_curvature=geo.mean_curvature * root,
            second_fundamental_sq=geo.second_fundamental_sq * mu,
            area_element=geo.area_element * mu ** (-snapshot.dimension / 2.0),
            normal_part=normal_part,
            tangential_norm_sq=np.sum(tangential ** 2, axis=1),
            tilt=geo.tilt,
            segment_lengths=geo.segment_lengths / root,
            spacing=geo.spacing / root,
        )

    rep: Representation = snapshot.representation.without_parametrization()
    return replace(snapshot, representation=rep, nodes=nodes, initial_positions=x0,
                   time=time, geometry=geometry)


def similarity_clock(t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """s = log(2t + 1) / 2."""
    return 0.5 * np.log1p(2.0 * np.asarray(t, dtype=float))


def physical_clock(s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """t = (e^{2s} - 1) / 2."""
    return 0.5 * np.expm1(2.0 * np.asarray(s, dtype=float))


def to_similarity_variables(snapshot: HypersurfaceSnapshot) -> HypersurfaceSnapshot:
    """x~ = x / sqrt(2t+1) on the s clock; geometry is recomputed by the caller."""
    if snapshot.clock != Clock.T:
        raise ValueError("Snapshot is already on the similarity clock")
    stretch = np.sqrt(2.0 * snapshot.time + 1.0)
    x0 = snapshot.initial_positions
    return replace(
        snapshot,
        representation=snapshot.representation.without_parametrization(),
        nodes=snapshot.nodes / stretch,
        initial_positions=x0,
        time=float(similarity_clock(snapshot.time)),
        clock=Clock.S,
        geometry=None,
    )


def type_iii_product(max_curvature_sq: float, clock: float, clock_kind: Clock) -> float:
    """
    t * max|A|^2 in physical time.

    On the s clock |A|^2 of the rescaled surface is (2t+1) times the
    physical one, so t |A|^2 = (1 - e^{-2s}) / 2 * |A~|^2.
    """
    if clock_kind == Clock.T:
        return clock * max_curvature_sq
    return 0.5 * (-np.expm1(-2.0 * clock)) * max_curvature_sq
