"""
Truncated quadrature of weighted integrals over a snapshot.

Node weights come from the geometry cache (trapezoid weights on the
parameter grid times the rotational volume factor), so every integral is a
masked sum over nodes with |x| <= R_int.
"""

import logging

import numpy as np
from dataclasses import dataclass
from scipy.special import logsumexp
from typing import Iterable, Optional, Tuple

from core.config import TOLERANCES
from core.errors import QuadratureError
from functionals.weights import WeightChoice, WeightKind, log_weight
from geometry.compute import signed_expander_residual
from geometry.snapshot import Clock, HypersurfaceSnapshot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with its truncation metadata."""
    value: float
    truncation: float               # R_int used, inf for the whole grid
    excluded_nodes: int             # Nodes dropped by the overflow policy
    excluded_fraction: float        # Share of the (log-summed) integral they carry

    def __float__(self) -> float:
        return self.value

    @property
    def flagged(self) -> bool:
        return self.excluded_fraction > TOLERANCES['excluded_fraction']


def window_radius(snapshot: HypersurfaceSnapshot, measure: str = 'distance') -> np.ndarray:
    """
    Radius that truncation windows and annuli are measured in: |x| for
    `distance`, the distance r to the rotation axis for `axis`.

    Raises:
        ValueError: unknown measure
    """
    if measure == 'distance':
        return np.sqrt(snapshot.radius_sq)
    if measure == 'axis':
        return np.abs(snapshot.nodes[:, 0])
    raise ValueError(f"Unknown window measure: {measure}")


def _window(snapshot: HypersurfaceSnapshot, truncation: Optional[float], measure: str = 'distance') -> np.ndarray:
    if truncation is None or not np.isfinite(truncation):
        return np.ones(snapshot.node_count, dtype=bool)
    return window_radius(snapshot, measure) <= truncation


def integrate(
    snapshot: HypersurfaceSnapshot,
    exponent: np.ndarray,
    factor: Optional[np.ndarray] = None,
    truncation: Optional[float] = None,
    measure: str = 'distance'
) -> QuadratureResult:
    """
    Sum of factor * e^{exponent} * dmu over nodes with |x| <= truncation
    (r <= truncation when `measure` is `axis`).

    Nodes whose exponent exceeds the overflow threshold are excluded and
    their share of the total is reported through log-sum-exp.

    Raises:
        QuadratureError: no node inside the window
    """
    geo = snapshot.require_geometry()
    mask = _window(snapshot, truncation, measure) & (geo.area_element > 0.0)
    if not np.any(mask):
        raise QuadratureError(f"Empty integration window (R_int = {truncation})")
    factor = np.ones(snapshot.node_count) if factor is None else np.asarray(factor, dtype=float)

    magnitude = np.abs(factor[mask])
    live = magnitude > 0.0
    log_terms = exponent[mask][live] + np.log(geo.area_element[mask][live]) + np.log(magnitude[live])
    over = exponent[mask][live] > TOLERANCES['overflow_exponent']

    kept = ~over
    value = float(np.sum(np.sign(factor[mask][live][kept]) * np.exp(log_terms[kept])))
    excluded_fraction = 0.0
    if np.any(over):
        excluded_fraction = float(np.exp(logsumexp(log_terms[over]) - logsumexp(log_terms)))
        logger.warning("Overflow policy excluded %d nodes carrying %.3g of the integral",
                       int(np.sum(over)), excluded_fraction)
    return QuadratureResult(
        value=value,
        truncation=float('inf') if truncation is None else float(truncation),
        excluded_nodes=int(np.sum(over)),
        excluded_fraction=excluded_fraction,
    )


def weighted_mass(snapshot: HypersurfaceSnapshot, weight: WeightChoice,
                  truncation: Optional[float] = None) -> QuadratureResult:
    """Integral of weight * dmu over |x| <= R_int."""
    return integrate(snapshot, log_weight(snapshot, weight), truncation=truncation)


def expander_deficit(snapshot: HypersurfaceSnapshot, weight: WeightChoice,
                     truncation: Optional[float] = None, measure: str = 'distance') -> QuadratureResult:
    """Integral of (H + <x, nu>)^2 * weight * dmu over |x| <= R_int."""
    residual = signed_expander_residual(snapshot)
    return integrate(snapshot, log_weight(snapshot, weight), factor=residual ** 2, truncation=truncation,
                     measure=measure)


def initial_mass(snapshot: HypersurfaceSnapshot, truncation: Optional[float] = None) -> QuadratureResult:
    """C0 = integral of e^{-|x0|^2/2} dmu0 on an initial snapshot."""
    return weighted_mass(snapshot, WeightChoice((WeightKind.CURRENT_HALF_GAUSSIAN,)), truncation)


def custom_weight_admissibility(snapshot: HypersurfaceSnapshot, f0: np.ndarray,
                                truncation: Optional[float] = None) -> QuadratureResult:
    """Integral of e^{|x0|^2/2} f0 dmu0, which must be finite for a custom weight."""
    exponent = 0.5 * np.sum(snapshot.x0 ** 2, axis=1) + np.log(np.asarray(f0, dtype=float))
    return integrate(snapshot, exponent, truncation=truncation)


def huisken_entropy(snapshot: HypersurfaceSnapshot, reference_time: float,
                    truncation: Optional[float] = None) -> QuadratureResult:
    """
    Gaussian density (4 pi (T - t))^{-n/2} e^{-|x|^2 / (4 (T - t))} integrated over the snapshot.

    Raises:
        ValueError: t >= T
    """
    tau = reference_time - snapshot.time
    if tau <= 0.0:
        raise ValueError(f"Huisken entropy needs t < T, got t={snapshot.time}, T={reference_time}")
    n = snapshot.dimension
    exponent = -0.5 * n * np.log(4.0 * np.pi * tau) - snapshot.radius_sq / (4.0 * tau)
    return integrate(snapshot, exponent, truncation=truncation)


def area_in_ball(snapshot: HypersurfaceSnapshot, radius: float) -> float:
    """H^n(M intersected with B(o, R))."""
    return integrate(snapshot, np.zeros(snapshot.node_count), truncation=radius).value


def volume_growth_exponent(snapshot: HypersurfaceSnapshot, radii: Iterable[float]) -> Tuple[float, float]:
    """
    Least-squares fit of area(B_R) = C R^m over a radius ladder.

    Returns:
        Tuple of (m, C)
    """
    radii = np.asarray(list(radii), dtype=float)
    areas = np.array([area_in_ball(snapshot, r) for r in radii])
    slope, intercept = np.polyfit(np.log(radii), np.log(areas), 1)
    return float(slope), float(np.exp(intercept))


def integrated_density(snapshot: HypersurfaceSnapshot, truncation: Optional[float] = None) -> QuadratureResult:
    """Integral of the expander density rho dmu on the t clock."""
    return weighted_mass(snapshot, WeightChoice((WeightKind.EXPANDER_DENSITY,)), truncation)


def density_rate_defect(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    """
    Extra term in the rate of rho dmu under plain MCF, per unit rho dmu.

    d/dt(rho dmu) = -(H + <x,nu>/(2t+1))^2 rho dmu
                    - (n/(2t+1) + <x, H_vec>/(2t+1) + |x^T|^2/(2t+1)^2) rho dmu,
    with <x, H_vec> = -H <x, nu>. The extra term integrates to zero on
    closed hypersurfaces.
    """
    if snapshot.clock != Clock.T:
        raise ValueError("The expander density rate lives on the t clock")
    geo = snapshot.require_geometry()
    stretch = 2.0 * snapshot.time + 1.0
    n = snapshot.dimension
    x_dot_h = -geo.mean_curvature * geo.normal_part
    return -(n / stretch + x_dot_h / stretch + geo.tangential_norm_sq / stretch ** 2)


def integrated_density_defect(snapshot: HypersurfaceSnapshot,
                              truncation: Optional[float] = None) -> QuadratureResult:
    """Integral of the plain-MCF defect against rho dmu; zero on closed hypersurfaces."""
    density = WeightChoice((WeightKind.EXPANDER_DENSITY,))
    return integrate(snapshot, log_weight(snapshot, density), factor=density_rate_defect(snapshot),
                     truncation=truncation)


def truncation_sensitivity(snapshot: HypersurfaceSnapshot, weight: WeightChoice, truncation: float) -> float:
    """Relative change of weighted_mass between R_int and 2 R_int."""
    inner = weighted_mass(snapshot, weight, truncation).value
    outer = weighted_mass(snapshot, weight, 2.0 * truncation).value
    scale = max(abs(outer), np.finfo(float).tiny)
    return abs(outer - inner) / scale


def weighted_residual_sup(snapshot: HypersurfaceSnapshot, alpha: float = 1.0, epsilon: float = 0.5,
                          truncation: Optional[float] = None) -> float:
    """sup |H + <x,nu>|^2 V^2 / (1 + alpha |x|^2)^{1 - epsilon} over |x| <= R."""
    geo = snapshot.require_geometry()
    mask = _window(snapshot, truncation)
    residual = signed_expander_residual(snapshot)
    quantity = residual ** 2 * geo.tilt ** 2 / (1.0 + alpha * snapshot.radius_sq) ** (1.0 - epsilon)
    return float(np.max(quantity[mask]))
