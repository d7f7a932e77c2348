"""
Rotationally symmetric graphical self-expanders.

A radial graph u(r) over R^n is an expander (H + <x, nu> = 0) iff

    u_rr / (1 + u_r^2) + (n - 1) u_r / r + r u_r - u = 0.

At the axis the equation forces u_r(0) = 0 and u_rr(0) = u(0) / n, so the
integration starts at a small radius from the series u(0) + u(0) r^2 / (2n).
The profile is sampled on a uniform grid and re-checked node-wise with the
discrete geometry; the grid is halved until the residual meets the tolerance.
"""

import logging

import numpy as np
from dataclasses import dataclass, field
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from typing import Dict, List

from core.config import SOLVER_DEFAULTS
from core.errors import ExpanderBlowup, MonitorError, ToleranceNotMet
from geometry.compute import compute_geometry, expander_residual
from geometry.representation import Representation, RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpanderProfile:
    """Sampled expander height with its measured residual."""
    dimension: int
    initial_height: float
    r: np.ndarray
    u: np.ndarray
    slope: float                 # u_r at the end of the grid, the cone slope estimate
    residual: float              # sup |H + <x, nu>| on the grid
    tolerance: float
    metadata: Dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def height(self, r: np.ndarray) -> np.ndarray:
        return CubicSpline(self.r, self.u, bc_type=((1, 0.0), 'not-a-knot'))(np.asarray(r, dtype=float))

    def snapshot(self, clock: Clock = Clock.S) -> HypersurfaceSnapshot:
        """Profile as a RadialGraph snapshot at clock value 0."""
        rep = Representation(RepresentationKind.RADIAL_GRAPH, dimension=self.dimension, start_on_axis=True)
        return HypersurfaceSnapshot(rep, np.column_stack([self.r, self.u]), time=0.0, clock=clock)

    def sidecar(self) -> Dict[str, object]:
        return {
            'kind': RepresentationKind.RADIAL_GRAPH.value,
            'dimension': self.dimension,
            'initial_height': self.initial_height,
            'r_max': self.r_max,
            'nodes': len(self.r),
            'slope': self.slope,
            'residual': self.residual,
            'tolerance': self.tolerance,
            **self.metadata,
        }


def expander_rhs(r: float, y: np.ndarray, dimension: int) -> np.ndarray:
    """(u, u_r) -> (u_r, u_rr) for the expander ODE, r > 0."""
    u, p = y
    return np.array([p, (1.0 + p * p) * (u - r * p - (dimension - 1) * p / r)])


def _series(r: np.ndarray, u0: float, dimension: int) -> np.ndarray:
    return u0 + u0 / (2.0 * dimension) * np.asarray(r) ** 2


def _integrate(dimension: int, u0: float, r_max: float, r_start: float):
    def slope_blowup(r, y, n):
        return SOLVER_DEFAULTS['slope_blowup'] - abs(y[1])
    slope_blowup.terminal = True

    y0 = [_series(r_start, u0, dimension), u0 / dimension * r_start]
    solution = solve_ivp(
        expander_rhs, (r_start, r_max), y0, args=(dimension,),
        method=SOLVER_DEFAULTS['method'], rtol=SOLVER_DEFAULTS['rtol'], atol=SOLVER_DEFAULTS['atol'],
        dense_output=True, events=slope_blowup,
    )
    if solution.status != 0:
        reached = float(solution.t[-1])
        raise ExpanderBlowup(
            f"Expander ODE for u(0)={u0}, n={dimension} stopped at r={reached:.4g} before R_max={r_max} "
            f"({solution.message})")
    return solution


def _sample(solution, dimension: int, u0: float, r: np.ndarray, r_start: float) -> np.ndarray:
    u = np.empty_like(r)
    near = r < r_start
    u[near] = _series(r[near], u0, dimension)
    u[~near] = solution.sol(r[~near])[0]
    return u


def solve_graph_expander(
    dimension: int,
    initial_height: float,
    r_max: float = SOLVER_DEFAULTS['r_max'],
    tol: float = SOLVER_DEFAULTS['tol'],
    grid_step: float = SOLVER_DEFAULTS['grid_step'],
    max_refinements: int = SOLVER_DEFAULTS['max_refinements'],
) -> ExpanderProfile:
    """
    Shoot the expander ODE from the axis and sample it to tolerance.

    Args:
        dimension: n, the dimension of the graph
        initial_height: u(0)
        r_max: End of the radial grid, at least 5
        tol: Required sup of |H + <x, nu>| on the sampled grid
        grid_step: Initial grid step, halved until the residual meets tol
        max_refinements: Number of halvings allowed

    Returns:
        ExpanderProfile with residual history in its metadata

    Raises:
        ValueError: tol <= 0, r_max < 5 or dimension < 1
        ExpanderBlowup: the ODE blew up before r_max
        ToleranceNotMet: refinement did not bring the residual below tol
    """
    if tol <= 0.0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    if r_max < 5.0:
        raise ValueError(f"R_max must be at least 5, got {r_max}")
    if dimension < 1:
        raise ValueError(f"Dimension must be at least 1, got {dimension}")

    r_start = SOLVER_DEFAULTS['r_start']
    solution = _integrate(dimension, initial_height, r_max, r_start)

    # Second shot from ten times closer to the axis; a gap above tol is reported as multiplicity
    check = _integrate(dimension, initial_height, r_max, 0.1 * r_start)
    check_r = np.linspace(r_start, r_max, 64)
    branch_gap = float(np.max(np.abs(solution.sol(check_r)[0] - check.sol(check_r)[0])))
    multiplicity = 'suspected' if branch_gap > tol else 'not_detected'
    if multiplicity == 'suspected':
        logger.warning("Expander u(0)=%g: start-radius shots differ by %.3g", initial_height, branch_gap)

    history: List[Dict[str, float]] = []
    step = grid_step
    for refinement in range(max_refinements + 1):
        count = int(round(r_max / step))
        r = np.linspace(0.0, r_max, count + 1)
        u = _sample(solution, dimension, initial_height, r, r_start)
        rep = Representation(RepresentationKind.RADIAL_GRAPH, dimension=dimension, start_on_axis=True)
        snap = compute_geometry(HypersurfaceSnapshot(rep, np.column_stack([r, u]), clock=Clock.S))
        residual = float(np.max(expander_residual(snap)))
        history.append({'grid_step': r_max / count, 'residual': residual})
        logger.debug("Expander u(0)=%g: step %.4g residual %.3e", initial_height, r_max / count, residual)
        if residual <= tol:
            slope = float(solution.sol(r_max)[1])
            logger.info("Expander n=%d u(0)=%g: residual %.3e on %d nodes, slope %.6g",
                        dimension, initial_height, residual, len(r), slope)
            return ExpanderProfile(
                dimension=dimension,
                initial_height=float(initial_height),
                r=r,
                u=u,
                slope=slope,
                residual=residual,
                tolerance=tol,
                metadata={
                    'refinements': refinement,
                    'residual_history': history,
                    'ode_evaluations': int(solution.nfev),
                    'series_start': r_start,
                    'multiplicity': multiplicity,
                },
            )
        step *= 0.5
    raise ToleranceNotMet(
        f"Expander u(0)={initial_height}: residual {history[-1]['residual']:.3e} above {tol} "
        f"after {max_refinements} refinements")


def compare_to_expander(snapshot: HypersurfaceSnapshot, profile: ExpanderProfile, window: float) -> float:
    """
    Sup of the height difference to an expander profile on |r| <= window.

    The snapshot must be graphical over the axis: a RadialGraph or a
    RevolutionProfile whose r increases strictly.

    Raises:
        MonitorError: incompatible representation or window outside a grid
    """
    nodes = snapshot.nodes
    r = nodes[:, 0]
    if snapshot.kind == RepresentationKind.PLANAR_CURVE or np.any(np.diff(r) <= 0.0):
        raise MonitorError("Expander comparison needs a graph over the radial axis")
    if snapshot.dimension != profile.dimension:
        raise MonitorError(f"Dimension {snapshot.dimension} does not match the profile's {profile.dimension}")
    if window <= 0.0 or window > r[-1] + 1e-12 or window > profile.r_max + 1e-12:
        raise MonitorError(
            f"Incompatible windows: R={window}, snapshot reaches {r[-1]:.4g}, profile {profile.r_max:.4g}")
    inside = r <= window
    return float(np.max(np.abs(nodes[inside, 1] - profile.height(r[inside]))))

