"""
Per-material-point rate identities, measured by finite differences in time.

Each identity pairs a per-node quantity q_p with its predicted rate r_p.
The measured rate is np.gradient of q_p over the sample clocks; the
mismatch is max|measured - predicted| relative to the size of the
predicted rate (or of q_p when the rate vanishes identically).
"""

import logging

import numpy as np
from dataclasses import dataclass
from typing import Callable, List, Sequence

from core.config import TOLERANCES
from core.errors import MonitorError
from geometry.compute import signed_expander_residual
from geometry.snapshot import Clock, HypersurfaceSnapshot, MaterialLabel

logger = logging.getLogger(__name__)

NodeQuantity = Callable[[HypersurfaceSnapshot], np.ndarray]

# Largest relative change of q_p between consecutive samples
MAX_SAMPLE_CHANGE = 0.25


@dataclass(frozen=True)
class PointwiseRateSeries:
    """Both sides of a pointwise identity at one material point."""
    name: str
    label: MaterialLabel
    clocks: np.ndarray
    values: np.ndarray       # q_p
    measured: np.ndarray     # d/dclock q_p by finite differences
    predicted: np.ndarray    # Right-hand side of the identity

    @property
    def relative_mismatch(self) -> float:
        error = float(np.max(np.abs(self.measured - self.predicted)))
        scale = float(np.max(np.abs(self.predicted)))
        value_scale = float(np.max(np.abs(self.values)))
        if scale <= 1e-12 * value_scale or scale == 0.0:
            scale = value_scale
        if scale == 0.0:
            return error
        return error / scale

    def passes(self, tol: float = None) -> bool:
        tol = TOLERANCES['tol_pointwise'] if tol is None else tol
        return self.relative_mismatch <= tol


def _node_index(snapshot: HypersurfaceSnapshot, label: MaterialLabel) -> int:
    if snapshot.labels is None:
        raise MonitorError("Pointwise identities need material labels (parametric gauge)")
    hits = np.flatnonzero(snapshot.labels == label)
    if len(hits) != 1:
        raise MonitorError(f"Material label {label} lost at clock {snapshot.time:.6g}")
    return int(hits[0])


def material_rate(
    name: str,
    samples: Sequence[HypersurfaceSnapshot],
    label: MaterialLabel,
    quantity: NodeQuantity,
    rate: NodeQuantity,
    clock: Clock
) -> PointwiseRateSeries:
    """
    Measure d/dclock of a per-node quantity at one material point.

    Args:
        name: Identity name for reports
        samples: Consecutive snapshots of one run, geometry cached
        label: Material label to follow
        quantity: Per-node quantity q
        rate: Per-node predicted rate of q
        clock: Clock the samples must be on

    Raises:
        MonitorError: fewer than 3 samples, wrong clock, lost label,
            non-increasing clocks or samples too far apart
    """
    if len(samples) < 3:
        raise MonitorError(f"{name}: need at least 3 samples, got {len(samples)}")
    clocks: List[float] = []
    values: List[float] = []
    predicted: List[float] = []
    for snapshot in samples:
        if snapshot.clock != clock:
            raise MonitorError(f"{name} is stated on the {clock.value} clock")
        index = _node_index(snapshot, label)
        clocks.append(snapshot.time)
        values.append(float(quantity(snapshot)[index]))
        predicted.append(float(rate(snapshot)[index]))

    clocks = np.asarray(clocks)
    values = np.asarray(values)
    if np.any(np.diff(clocks) <= 0.0):
        raise MonitorError(f"{name}: sample clocks must be strictly increasing")
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    jump = float(np.max(np.abs(np.diff(values)))) / scale
    if jump > MAX_SAMPLE_CHANGE:
        raise MonitorError(f"{name}: sample spacing too coarse (relative change {jump:.3g} between samples)")

    measured = np.gradient(values, clocks, edge_order=2)
    series = PointwiseRateSeries(name, label, clocks, values, measured, np.asarray(predicted))
    logger.debug("%s at label %d: mismatch %.3e", name, label, series.relative_mismatch)
    return series


def _density_t(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    geo = snapshot.require_geometry()
    shifted = snapshot.time + 0.5
    rho = shifted ** (-0.5 * snapshot.dimension) * np.exp(snapshot.radius_sq / (4.0 * shifted))
    return rho * geo.area_element


def _density_t_rate(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    geo = snapshot.require_geometry()
    stretch = 2.0 * snapshot.time + 1.0
    return -(geo.mean_curvature + geo.normal_part / stretch) ** 2 * _density_t(snapshot)


def _density_s(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    return np.exp(0.5 * snapshot.radius_sq) * snapshot.require_geometry().area_element


def _density_s_rate(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    return -signed_expander_residual(snapshot) ** 2 * _density_s(snapshot)


def _gaussian_s(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    return np.exp(-0.5 * snapshot.radius_sq) * snapshot.require_geometry().area_element


def _gaussian_s_rate(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    geo = snapshot.require_geometry()
    return (geo.normal_part - geo.mean_curvature) * signed_expander_residual(snapshot) * _gaussian_s(snapshot)


def _position_rate(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    geo = snapshot.require_geometry()
    return -2.0 * geo.normal_part * signed_expander_residual(snapshot)


def _area(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    return snapshot.require_geometry().area_element


def _area_rate(snapshot: HypersurfaceSnapshot) -> np.ndarray:
    geo = snapshot.require_geometry()
    return -geo.mean_curvature * signed_expander_residual(snapshot) * geo.area_element


def pointwise_density_rate(samples: Sequence[HypersurfaceSnapshot], label: MaterialLabel) -> PointwiseRateSeries:
    """d/dt(rho dmu) = -(H + <x,nu>/(2t+1))^2 rho dmu under drifting MCF."""
    return material_rate('pointwise_density_rate', samples, label, _density_t, _density_t_rate, Clock.T)


def normalized_density_rate(samples: Sequence[HypersurfaceSnapshot], label: MaterialLabel) -> PointwiseRateSeries:
    """d/ds(rho~ dmu~) = -(H~ + <x~,nu~>)^2 rho~ dmu~ with rho~ = e^{|x~|^2/2}."""
    return material_rate('normalized_density_rate', samples, label, _density_s, _density_s_rate, Clock.S)


def factorization_rate(samples: Sequence[HypersurfaceSnapshot], label: MaterialLabel) -> PointwiseRateSeries:
    """d/ds(e^{-|x~|^2/2} dmu~) = (<x~,nu~> - H~)(<x~,nu~> + H~) e^{-|x~|^2/2} dmu~."""
    return material_rate('factorization_rate', samples, label, _gaussian_s, _gaussian_s_rate, Clock.S)


def position_growth_rate(samples: Sequence[HypersurfaceSnapshot], label: MaterialLabel) -> PointwiseRateSeries:
    """d/ds |x~|^2 = -2 <x~,nu~> (H~ + <x~,nu~>)."""
    return material_rate('position_growth', samples, label,
                         lambda snap: snap.radius_sq, _position_rate, Clock.S)


def area_element_rate(samples: Sequence[HypersurfaceSnapshot], label: MaterialLabel) -> PointwiseRateSeries:
    """d/ds dmu~ = -H~ (H~ + <x~,nu~>) dmu~."""
    return material_rate('area_element_rate', samples, label, _area, _area_rate, Clock.S)


POINTWISE_IDENTITIES = {
    'pointwise_density_rate': pointwise_density_rate,
    'normalized_density_rate': normalized_density_rate,
    'factorization_rate': factorization_rate,
    'position_growth': position_growth_rate,
    'area_element_rate': area_element_rate,
}
