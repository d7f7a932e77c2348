"""
Differential geometry of discretized curves, profiles and radial graphs.

Interior nodes use the three-point circle stencil (centered chord tangent,
circumcircle curvature); open ends use second-order one-sided differences;
axis caps are closed by mirror ghosts. Snapshots carrying an analytic
parametrization use its exact derivatives instead.
"""

import logging

import numpy as np
from dataclasses import replace
from typing import Optional, Tuple, Union

from core.config import GEOMETRY_DEFAULTS
from geometry.representation import AnalyticParametrization, Representation
from geometry.snapshot import GeometryCache, HypersurfaceSnapshot
from processing.finite_differences import Stencils

logger = logging.getLogger(__name__)


def _trapezoid_weights(sigma: np.ndarray, period: Optional[float]) -> np.ndarray:
    """Trapezoid weights on a (possibly periodic) parameter grid."""
    gaps = np.diff(sigma)
    if period is not None:
        gaps = np.append(gaps, period - (sigma[-1] - sigma[0]))
        return 0.5 * (gaps + np.roll(gaps, 1))
    weights = np.zeros_like(sigma)
    weights[:-1] += 0.5 * gaps
    weights[1:] += 0.5 * gaps
    return weights


def _segment_weights(lengths: np.ndarray, closed: bool) -> np.ndarray:
    """Half the adjacent segment lengths per node."""
    if closed:
        return 0.5 * (lengths + np.roll(lengths, 1))
    weights = np.zeros(len(lengths) + 1)
    weights[:-1] += 0.5 * lengths
    weights[1:] += 0.5 * lengths
    return weights


def _discrete_tangent_curvature(nodes: np.ndarray, rep: Representation) -> Tuple[np.ndarray, np.ndarray]:
    padded, centered = Stencils.pad_curve(
        nodes, periodic=rep.closed,
        start_on_axis=rep.start_on_axis, end_on_axis=rep.end_on_axis,
    )
    tangent = np.empty_like(nodes)
    kappa = np.empty(len(nodes))
    idx = np.flatnonzero(centered)
    tangent[idx], kappa[idx] = Stencils.circle_stencil(padded[idx], padded[idx + 1], padded[idx + 2])
    for at_end in (False, True):
        node = -1 if at_end else 0
        if not centered[node]:
            d1, d2 = Stencils.one_sided(nodes, at_end=at_end)
            tangent[node], kappa[node] = Stencils.curvature_from_derivatives(d1, d2)
    return tangent, kappa


def compute_geometry(snapshot: HypersurfaceSnapshot) -> HypersurfaceSnapshot:
    """
    Fill the per-node geometry cache.

    For rotational representations H = k_profile + (n-1) nu_r / r, with the
    axis limit nu_r / r -> k_profile at declared caps; a radial graph is
    handled as the profile (r, u(r)), which reproduces
    H = u_rr / W^3 + (n-1) u_r / (r W).

    Args:
        snapshot: Snapshot whose nodes satisfy the representation invariants

    Returns:
        Copy of the snapshot with the geometry cache populated

    Raises:
        GeometryError: representation invariants violated
    """
    rep = snapshot.representation
    nodes = np.asarray(snapshot.nodes, dtype=float)
    rep.validate_nodes(nodes)
    n = rep.dimension

    param: Optional[AnalyticParametrization] = rep.parametrization
    if param is not None:
        d1 = param.first(param.sigma)
        d2 = param.second(param.sigma)
        tangent, kappa = Stencils.curvature_from_derivatives(d1, d2)
    else:
        tangent, kappa = _discrete_tangent_curvature(nodes, rep)

    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])

    rotational = np.zeros(len(nodes))
    if rep.is_rotational:
        r = nodes[:, 0]
        on_axis = np.abs(r) <= GEOMETRY_DEFAULTS['axis_tolerance']
        safe_r = np.where(on_axis, 1.0, r)
        rotational = np.where(on_axis, kappa, normal[:, 0] / safe_r)

    mean_curvature = kappa + (n - 1) * rotational
    second_fundamental_sq = kappa ** 2 + (n - 1) * rotational ** 2

    chords = np.diff(nodes, axis=0)
    kappa_next = kappa[1:]
    if rep.closed:
        chords = np.vstack([chords, nodes[0] - nodes[-1]])
        kappa_next = np.roll(kappa, -1)
    lengths = Stencils.arc_lengths(np.linalg.norm(chords, axis=1), 0.5 * (kappa[:len(chords)] + kappa_next))

    if param is not None:
        base_weights = np.linalg.norm(d1, axis=1) * _trapezoid_weights(param.sigma, param.period)
    else:
        base_weights = _segment_weights(lengths, rep.closed)
    if rep.is_rotational:
        radial = np.abs(nodes[:, 0]) ** (n - 1) if n > 1 else np.ones(len(nodes))
        area = rep.rotational_factor * radial * base_weights
    else:
        area = base_weights

    normal_part = np.sum(nodes * normal, axis=1)
    tangential = nodes - normal_part[:, None] * normal
    tangential_norm_sq = np.sum(tangential ** 2, axis=1)

    lean = normal @ rep.direction
    positive = lean > 0.0
    tilt = np.full(len(nodes), np.inf)
    tilt[positive] = 1.0 / lean[positive]

    cache = GeometryCache(
        tangent=tangent,
        normal=normal,
        profile_curvature=kappa,
        rotational_curvature=rotational,
        mean_curvature=mean_curvature,
        second_fundamental_sq=second_fundamental_sq,
        area_element=area,
        normal_part=normal_part,
        tangential_norm_sq=tangential_norm_sq,
        tilt=tilt,
        segment_lengths=lengths,
        spacing=float(np.min(lengths)),
    )
    return replace(snapshot, nodes=nodes, geometry=cache)


def ensure_geometry(snapshot: HypersurfaceSnapshot) -> HypersurfaceSnapshot:
    """Compute the geometry cache only if it is missing."""
    return snapshot if snapshot.geometry is not None else compute_geometry(snapshot)


def split_position(snapshot: HypersurfaceSnapshot, node: int) -> Tuple[float, float]:
    """
    Normal/tangential split of the position vector at one node.

    Returns:
        Tuple of (<x, nu>, |x^T|)
    """
    geo = snapshot.require_geometry()
    return float(geo.normal_part[node]), float(np.sqrt(geo.tangential_norm_sq[node]))


def expander_residual(
    snapshot: HypersurfaceSnapshot,
    node: Optional[int] = None
) -> Union[float, np.ndarray]:
    """
    Scalar expander residual |H_vec - x_perp| = |H + <x, nu>|.

    Args:
        snapshot: Snapshot with cached geometry
        node: Node index, or None for all nodes

    Returns:
        Residual at the node, or the per-node array
    """
    geo = snapshot.require_geometry()
    residual = np.abs(geo.mean_curvature + geo.normal_part)
    return residual if node is None else float(residual[node])


def signed_expander_residual(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    """H + <x, nu> per node."""
    geo = snapshot.require_geometry()
    return geo.mean_curvature + geo.normal_part


def orthonormality_defect(snapshot: HypersurfaceSnapshot) -> float:
    """max |<nu, d_sigma x>| / |d_sigma x| over nodes with both neighbours."""
    geo = snapshot.require_geometry()
    rep = snapshot.representation
    padded, centered = Stencils.pad_curve(
        snapshot.nodes, periodic=rep.closed,
        start_on_axis=rep.start_on_axis, end_on_axis=rep.end_on_axis,
    )
    idx = np.flatnonzero(centered)
    chord = padded[idx + 2] - padded[idx]
    dots = np.sum(geo.normal[idx] * chord, axis=1) / np.linalg.norm(chord, axis=1)
    return float(np.max(np.abs(dots)))
