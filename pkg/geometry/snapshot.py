"""
Immutable hypersurface snapshots and their cached geometry.
"""

import numpy as np
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from geometry.representation import Representation, RepresentationKind

# Index of a material point; stable under parametric time stepping
MaterialLabel = int


class Clock(Enum):
    """Flow clock: physical time t or similarity time s = log(2t+1)/2."""
    T = 't'
    S = 's'


@dataclass(frozen=True)
class GeometryCache:
    """Per-node differential geometry filled by compute_geometry."""
    tangent: np.ndarray               # (N, 2) unit tangent in the node plane
    normal: np.ndarray                # (N, 2) unit normal, tangent rotated clockwise
    profile_curvature: np.ndarray     # Curvature of the planar curve/profile
    rotational_curvature: np.ndarray  # nu_r / r, multiplicity n - 1 (zero for curves)
    mean_curvature: np.ndarray        # H, with H_vec = -H nu
    second_fundamental_sq: np.ndarray # |A|^2
    area_element: np.ndarray          # Quadrature weight of dmu per node, rotational factor included
    normal_part: np.ndarray           # <x, nu>
    tangential_norm_sq: np.ndarray    # |x^T|^2
    tilt: np.ndarray                  # V = <nu, w>^-1, inf where <nu, w> <= 0
    segment_lengths: np.ndarray       # Arc lengths between consecutive nodes
    spacing: float                    # Minimum segment length


@dataclass(frozen=True)
class HypersurfaceSnapshot:
    """
    A discretized immersion at one clock value.

    `initial_positions` holds x0 per node: the material positions at the
    start of a parametric run, or (r, u0(r)) on the fixed grid of a
    graphical run.
    """
    representation: Representation
    nodes: np.ndarray
    time: float = 0.0
    clock: Clock = Clock.T
    labels: Optional[np.ndarray] = None
    initial_positions: Optional[np.ndarray] = None
    geometry: Optional[GeometryCache] = field(default=None, compare=False)

    @property
    def kind(self) -> RepresentationKind:
        return self.representation.kind

    @property
    def dimension(self) -> int:
        return self.representation.dimension

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def radius_sq(self) -> np.ndarray:
        """|x|^2 per node (rotational directions contribute through r)."""
        return np.sum(self.nodes ** 2, axis=1)

    @property
    def x0(self) -> np.ndarray:
        """Initial positions, defaulting to the current nodes."""
        return self.nodes if self.initial_positions is None else self.initial_positions

    def with_nodes(self, nodes: np.ndarray, time: float) -> 'HypersurfaceSnapshot':
        """New snapshot with moved nodes; cached geometry and analytic data dropped."""
        return replace(
            self,
            representation=self.representation.without_parametrization(),
            nodes=np.asarray(nodes, dtype=float),
            time=float(time),
            geometry=None,
        )

    def require_geometry(self) -> GeometryCache:
        if self.geometry is None:
            raise ValueError("Geometry not computed; call compute_geometry first")
        return self.geometry
