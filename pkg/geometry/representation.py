"""
Discrete representations of curves and rotationally symmetric hypersurfaces.

All representations store planar nodes of shape (N, 2):

- PlanarCurve: positions (x, y) of a curve in R^2 (n = 1).
- RevolutionProfile: profile points (r, z) generating a hypersurface of
  dimension n >= 2 in R^{n+1}; the n-1 rotational directions are implicit.
- RadialGraph: (r, u(r)) on a grid starting at r = 0; the graph of a radial
  function over R^n.

The unit normal is the tangent rotated clockwise, (T_y, -T_x). With that
choice a counter-clockwise circle, a sphere profile running from the south
to the north pole, and a graph traversed with increasing r all carry the
normal for which H > 0 on convex pieces (outer normal for closed surfaces,
downward normal for graphs).
"""

import numpy as np
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from core.config import GEOMETRY_DEFAULTS
from core.constants import sphere_volume
from core.errors import GeometryError


class RepresentationKind(Enum):
    """Supported discretizations."""
    PLANAR_CURVE = 'planar_curve'
    REVOLUTION_PROFILE = 'revolution_profile'
    RADIAL_GRAPH = 'radial_graph'


@dataclass(frozen=True)
class AnalyticParametrization:
    """Exact parameter derivatives for nodes sampled from a closed form."""
    sigma: np.ndarray                                   # Parameter values of the nodes
    first: Callable[[np.ndarray], np.ndarray]           # sigma -> (N, 2) d/dsigma
    second: Callable[[np.ndarray], np.ndarray]          # sigma -> (N, 2) d2/dsigma2
    period: Optional[float] = None                      # Parameter period of a closed curve
    label: str = ''


@dataclass(frozen=True)
class Representation:
    """Kind, dimension and boundary structure of a discretized hypersurface."""
    kind: RepresentationKind
    dimension: int = 1                  # n, the hypersurface dimension
    closed: bool = False                # PlanarCurve only
    start_on_axis: bool = False         # Declared smooth cap at the first node
    end_on_axis: bool = False           # Declared smooth cap at the last node
    graph_direction: Optional[np.ndarray] = field(default=None, compare=False)
    parametrization: Optional[AnalyticParametrization] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == RepresentationKind.PLANAR_CURVE:
            if self.dimension != 1:
                raise GeometryError("PlanarCurve has dimension 1")
            if self.start_on_axis or self.end_on_axis:
                raise GeometryError("PlanarCurve has no rotation axis")
        elif self.kind == RepresentationKind.REVOLUTION_PROFILE:
            if self.dimension < 2:
                raise GeometryError("RevolutionProfile needs dimension n >= 2")
            if self.closed:
                raise GeometryError("RevolutionProfile cannot be periodic")
        elif self.kind == RepresentationKind.RADIAL_GRAPH:
            if self.dimension < 1:
                raise GeometryError("RadialGraph needs dimension n >= 1")
            if self.closed:
                raise GeometryError("RadialGraph cannot be periodic")

    @property
    def is_rotational(self) -> bool:
        return self.kind != RepresentationKind.PLANAR_CURVE

    @property
    def rotational_factor(self) -> float:
        """Volume of S^{n-1}, or 1 for planar curves."""
        if not self.is_rotational:
            return 1.0
        return sphere_volume(self.dimension - 1)

    @property
    def direction(self) -> np.ndarray:
        """Unit vector w in the plane of the nodes used for V = <nu, w>^-1."""
        if self.graph_direction is not None:
            w = np.asarray(self.graph_direction, dtype=float)
            return w / np.linalg.norm(w)
        return np.array([0.0, GEOMETRY_DEFAULTS['graph_direction_sign']])

    def without_parametrization(self) -> 'Representation':
        """Same representation with the analytic parametrization dropped."""
        if self.parametrization is None:
            return self
        return Representation(
            kind=self.kind, dimension=self.dimension, closed=self.closed,
            start_on_axis=self.start_on_axis, end_on_axis=self.end_on_axis,
            graph_direction=self.graph_direction,
        )

    def validate_nodes(self, nodes: np.ndarray) -> None:
        """
        Check the representation invariants on a node array.

        Raises:
            GeometryError: too few nodes, coincident nodes, axis degeneracy
                or a fold in a radial graph
        """
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise GeometryError(f"Nodes must have shape (N, 2), got {nodes.shape}")
        if not np.all(np.isfinite(nodes)):
            raise GeometryError("Nodes contain non-finite values")
        min_nodes = GEOMETRY_DEFAULTS['min_curve_nodes'] if self.kind == RepresentationKind.PLANAR_CURVE else 4
        if len(nodes) < min_nodes:
            raise GeometryError(f"{self.kind.value} needs at least {min_nodes} nodes, got {len(nodes)}")

        edges = np.diff(nodes, axis=0)
        if self.closed:
            edges = np.vstack([edges, nodes[0] - nodes[-1]])
        if np.any(np.linalg.norm(edges, axis=1) <= 0.0):
            raise GeometryError("Consecutive nodes coincide")

        if not self.is_rotational:
            return

        tol = GEOMETRY_DEFAULTS['axis_tolerance']
        r = nodes[:, 0]
        interior = r[1:-1]
        if np.any(interior <= tol):
            raise GeometryError("Axis degeneracy: interior node with r <= 0")
        for on_axis, value, label in ((self.start_on_axis, r[0], 'first'),
                                      (self.end_on_axis, r[-1], 'last')):
            if on_axis and abs(value) > tol:
                raise GeometryError(f"Declared cap but {label} node is off the axis (r={value:.3g})")
            if not on_axis and value <= tol:
                raise GeometryError(f"Axis degeneracy: {label} node touches the axis without a declared cap")

        if self.kind == RepresentationKind.RADIAL_GRAPH:
            if not self.start_on_axis:
                raise GeometryError("RadialGraph grid must start on the axis")
            if np.any(np.diff(r) <= 0.0):
                raise GeometryError("Non-graphical fold: radial grid is not strictly increasing")
