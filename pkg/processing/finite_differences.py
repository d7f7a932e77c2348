"""
Finite-difference stencils on uniform parameter grids.

Derivatives are taken with respect to the node index (unit spacing) unless a
spacing is passed; geometric quantities built from them are parametrization
invariant, so smooth non-uniform node distributions are fine.
"""

import numpy as np
from typing import Optional, Tuple


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """z-component of the planar cross product, row-wise."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


class Stencils:
    """Centered, one-sided and upwind stencils plus the three-point circle stencil."""

    @staticmethod
    def pad_curve(
        points: np.ndarray,
        periodic: bool = False,
        start_on_axis: bool = False,
        end_on_axis: bool = False
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Pad a planar node array with one ghost node per side where one exists.

        Axis ghosts mirror the neighbour across r = 0 (r odd, z even).

        Args:
            points: (N, 2) node positions
            periodic: Closed curve
            start_on_axis: First node lies on the rotation axis
            end_on_axis: Last node lies on the rotation axis

        Returns:
            Tuple of (padded array with NaN rows for missing ghosts,
            boolean mask of nodes that have both neighbours)
        """
        n = len(points)
        left = np.full(2, np.nan)
        right = np.full(2, np.nan)
        if periodic:
            left, right = points[-1], points[0]
        else:
            if start_on_axis:
                left = np.array([-points[1, 0], points[1, 1]])
            if end_on_axis:
                right = np.array([-points[-2, 0], points[-2, 1]])
        padded = np.vstack([left, points, right])
        centered = np.ones(n, dtype=bool)
        if not periodic:
            centered[0] = start_on_axis
            centered[-1] = end_on_axis
        return padded, centered

    @staticmethod
    def circle_stencil(prev: np.ndarray, cur: np.ndarray, nxt: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Three-point stencil: centered tangent and circumcircle curvature.

        Exact for nodes on a circle, second order on smooth curves whose
        node spacing varies smoothly.

        Returns:
            Tuple of (unit tangent (M, 2), signed curvature (M,), left turns positive)
        """
        a = cur - prev
        b = nxt - cur
        c = nxt - prev
        la = np.linalg.norm(a, axis=-1)
        lb = np.linalg.norm(b, axis=-1)
        lc = np.linalg.norm(c, axis=-1)
        tangent = c / lc[..., None]
        kappa = 2.0 * _cross(a, b) / (la * lb * lc)
        return tangent, kappa

    @staticmethod
    def one_sided(points: np.ndarray, at_end: bool) -> Tuple[np.ndarray, np.ndarray]:
        """
        Second-order one-sided first and second index derivatives at an open end.

        Args:
            points: (N, 2) nodes, N >= 4
            at_end: Evaluate at the last node instead of the first

        Returns:
            Tuple of (first derivative (2,), second derivative (2,))
        """
        p = points[::-1] if at_end else points
        d1 = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / 2.0
        d2 = 2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]
        if at_end:
            d1 = -d1
        return d1, d2

    @staticmethod
    def curvature_from_derivatives(d1: np.ndarray, d2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Unit tangent and signed curvature from parameter derivatives."""
        speed = np.linalg.norm(d1, axis=-1)
        return d1 / speed[..., None], _cross(d1, d2) / speed ** 3

    @staticmethod
    def arc_lengths(chords: np.ndarray, kappa_mid: np.ndarray) -> np.ndarray:
        """
        Arc length of circular arcs through chord endpoints.

        l = c * arcsin(c k / 2) / (c k / 2); reduces to the chord when k -> 0.
        """
        z = np.clip(np.abs(chords * kappa_mid) / 2.0, 0.0, 1.0)
        small = z < 1e-6
        safe = np.where(small, 1.0, z)
        ratio = np.where(small, 1.0 + z * z / 6.0, np.arcsin(safe) / safe)
        return chords * ratio

    @staticmethod
    def graph_derivatives(
        u_ext: np.ndarray,
        h: float,
        upwind: bool = False
    ) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
        """
        Radial derivatives of a height profile padded with 1 left and 2 right ghosts.

        Args:
            u_ext: heights [u_-1, u_0, ..., u_{N-1}, u_N, u_{N+1}]
            h: Uniform grid spacing
            upwind: Also return the second-order forward (upwind) first derivative

        Returns:
            Tuple of (u_r centered, u_rr, u_r forward or None), each of length N
        """
        left = u_ext[:-3]
        mid = u_ext[1:-2]
        right = u_ext[2:-1]
        u_r = (right - left) / (2.0 * h)
        u_rr = (right - 2.0 * mid + left) / (h * h)
        forward = None
        if upwind:
            far = u_ext[3:]
            forward = (-3.0 * mid + 4.0 * right - far) / (2.0 * h)
        return u_r, u_rr, forward
