"""
Radial graph form of the flows.

MCF (and its drifting variant, whose tangential term the graph gauge
absorbs):
    u_t = u_rr / (1 + u_r^2) + (n - 1) u_r / r
Both normalized variants, in similarity variables:
    u_s = u_rr / (1 + u_r^2) + (n - 1) u_r / r + r u_r - u
At r = 0 the term (n - 1) u_r / r is replaced by its limit (n - 1) u_rr.
The transport term r u_r carries information inward and is discretized
with the second-order upwind (forward) difference.
"""

import numpy as np

from core.errors import GeometryError
from processing.finite_differences import Stencils


def uniform_spacing(r: np.ndarray) -> float:
    """Grid spacing of a uniform radial grid starting at the axis."""
    gaps = np.diff(r)
    h = float(np.mean(gaps))
    if r[0] != 0.0 or np.max(np.abs(gaps - h)) > 1e-9 * max(h, 1.0):
        raise GeometryError("Graphical gauge needs a uniform radial grid starting at r = 0")
    return h


def graph_rhs(
    r: np.ndarray,
    u: np.ndarray,
    dimension: int,
    normalized: bool,
    right_ghosts: np.ndarray,
    h: float
) -> np.ndarray:
    """
    Right-hand side of the radial graph equation.

    Args:
        r: Uniform radial grid starting at 0
        u: Heights on the grid
        dimension: n, the graph dimension
        normalized: Similarity-variable form (adds r u_r - u)
        right_ghosts: Two heights beyond the last node
        h: Grid spacing

    Returns:
        du/dclock per node
    """
    u_ext = np.concatenate([[u[1]], u, right_ghosts])
    u_r, u_rr, forward = Stencils.graph_derivatives(u_ext, h, upwind=normalized)
    safe_r = np.where(r > 0.0, r, 1.0)
    radial = np.where(r > 0.0, u_r / safe_r, u_rr)
    rhs = u_rr / (1.0 + u_r ** 2) + (dimension - 1) * radial
    if normalized:
        rhs = rhs + r * forward - u
    return rhs


def graph_slope(u: np.ndarray, right_ghosts: np.ndarray, h: float) -> np.ndarray:
    """Centered u_r with the axis mirror ghost."""
    u_ext = np.concatenate([[u[1]], u, right_ghosts])
    u_r, _, _ = Stencils.graph_derivatives(u_ext, h)
    return u_r


def graph_step_bound(h: float, dimension: int, r_max: float, normalized: bool) -> float:
    """
    Explicit stability bound for the graph equation.

    The diffusion coefficient 1/(1+u_r^2) never exceeds 1; the axis row
    carries n. The upwind transport adds 4 r_max / h to the spectral radius.
    """
    radius = 4.0 * dimension / h ** 2
    if normalized:
        radius += 4.0 * r_max / h + 1.0
    return 2.0 / radius
