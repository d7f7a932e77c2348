"""
Hypothesis checks on initial data.
Each check reports HOLDS, FAILS or INCONCLUSIVE on the truncated grid,
with the value it measured and the nodes that witness it.
"""

import logging

import numpy as np
from dataclasses import dataclass, field
from enum import Enum
from scipy import signal
from typing import Dict, List, Optional, Sequence

from core.config import TOLERANCES
from functionals.integrals import initial_mass, volume_growth_exponent
from geometry.closed_forms import ProfileFunction
from geometry.compute import compute_geometry, ensure_geometry
from geometry.representation import Representation, RepresentationKind
from geometry.snapshot import HypersurfaceSnapshot

logger = logging.getLogger(__name__)

# Values of <x0,nu>^2 below this are treated as zero
WITNESS_FLOOR = 1e-12
# Witness ratios must not decay by more than this factor to count as linear growth
GAMMA_PERSISTENCE = 0.5
# Fitted exponent 1 - delta below this counts as sublinear growth
MAX_GROWTH_EXPONENT = 0.9
# Largest power of two tried by the mu search
MAX_MU_POWER = 30


class Status(Enum):
    HOLDS = 'HOLDS'
    FAILS = 'FAILS'
    INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass
class HypothesisCheck:
    """Outcome of one hypothesis check."""
    status: Status
    value: Optional[float] = None
    witnesses: List[int] = field(default_factory=list)
    note: str = ''

    def to_dict(self) -> Dict[str, object]:
        return {
            'status': self.status.value,
            'value': self.value,
            'witnesses': list(self.witnesses),
            'note': self.note,
        }


@dataclass
class AdmissibilityReport:
    checks: Dict[str, HypothesisCheck] = field(default_factory=dict)

    def __getitem__(self, name: str) -> HypothesisCheck:
        return self.checks[name]

    def to_dict(self) -> Dict[str, Dict[str, object]]:
        return {name: check.to_dict() for name, check in self.checks.items()}


def _shifted_normal_part(snapshot: HypersurfaceSnapshot, q0: np.ndarray) -> np.ndarray:
    geo = snapshot.require_geometry()
    return np.sum((snapshot.x0 - q0) * geo.normal, axis=1)


def _is_compact(snapshot: HypersurfaceSnapshot) -> bool:
    rep = snapshot.representation
    return rep.closed or (rep.start_on_axis and rep.end_on_axis)


class AdmissibilityChecker:
    """
    Checks of the hypotheses placed on initial data.

    Features:
    - Growth condition <x0,nu>^2 <= c (1 + |x0|^2)^(1 - delta) with witness search
    - Finiteness of C0 by window doubling
    - mu search for the convergence and nondecreasing regimes
    - Height shift making <x0 - q0 - c1 w, nu> <= 0
    """

    @staticmethod
    def growth_condition(
        snapshot: HypersurfaceSnapshot,
        outer_radius: float = 5.0
    ) -> HypothesisCheck:
        """
        Look for linear growth of <x0, nu> along the outer region.

        Witnesses are local maxima of gamma = <x0,nu>^2 / (1 + |x0|^2)
        beyond outer_radius. Two or more witnesses whose gamma does not
        decay mean the condition fails for every delta > 0. Otherwise the
        exponent 1 - delta is fitted from log <x0,nu>^2 against
        log(1 + |x0|^2) and the condition holds when it stays below
        MAX_GROWTH_EXPONENT.

        Args:
            snapshot: Initial snapshot with geometry
            outer_radius: Start of the outer region in |x0|

        Returns:
            HypothesisCheck whose value is the gamma estimate on failure
            and the fitted delta otherwise
        """
        if _is_compact(snapshot):
            return HypothesisCheck(Status.HOLDS, note='compact')
        geo = snapshot.require_geometry()
        x0_sq = np.sum(snapshot.x0 ** 2, axis=1)
        normal_sq = geo.normal_part ** 2
        ratio = normal_sq / (1.0 + x0_sq)
        outer = np.flatnonzero(x0_sq >= outer_radius ** 2)
        if len(outer) < 3:
            return HypothesisCheck(Status.INCONCLUSIVE, note=f'no nodes beyond |x0| = {outer_radius}')

        peaks, _ = signal.find_peaks(ratio[outer])
        witnesses = outer[peaks]
        strong = witnesses[ratio[witnesses] > WITNESS_FLOOR]
        if len(strong) >= 2:
            gamma = ratio[strong]
            if np.min(gamma) >= GAMMA_PERSISTENCE * np.max(gamma):
                return HypothesisCheck(Status.FAILS, float(np.mean(gamma)), strong.tolist(),
                                       note='<x0,nu>^2 grows like |x0|^2 along the witnesses')

        if np.max(normal_sq[outer]) <= WITNESS_FLOOR:
            return HypothesisCheck(Status.HOLDS, 1.0, note='<x0,nu> vanishes on the outer region')
        live = outer[normal_sq[outer] > WITNESS_FLOOR]
        exponent, _ = np.polyfit(np.log1p(x0_sq[live]), np.log(normal_sq[live]), 1)
        delta = 1.0 - float(exponent)
        if exponent < MAX_GROWTH_EXPONENT:
            return HypothesisCheck(Status.HOLDS, delta, note=f'fitted delta = {delta:.3g}')
        return HypothesisCheck(Status.INCONCLUSIVE, delta, witnesses.tolist(),
                               note='growth exponent close to linear without persistent witnesses')

    @staticmethod
    def initial_mass_finite(snapshot: HypersurfaceSnapshot) -> HypothesisCheck:
        """C0 = integral of e^{-|x0|^2/2} dmu0, finite when halving the window leaves it unchanged."""
        reach = float(np.sqrt(np.max(np.sum(snapshot.x0 ** 2, axis=1))))
        full = initial_mass(snapshot).value
        if _is_compact(snapshot):
            return HypothesisCheck(Status.HOLDS, full, note='compact')
        half = initial_mass(snapshot, 0.5 * reach).value
        change = abs(full - half) / max(abs(full), np.finfo(float).tiny)
        status = Status.HOLDS if change <= TOLERANCES['truncation_sensitivity'] else Status.INCONCLUSIVE
        return HypothesisCheck(status, full, note=f'relative change {change:.3g} between R/2 and R = {reach:.4g}')

    @staticmethod
    def convergent_mu(snapshot: HypersurfaceSnapshot, q0: Sequence[float] = (0.0, 0.0)) -> Optional[float]:
        """
        Smallest mu = 2^k, k >= 0, with mu H >= -<x0 - q0, nu> at every node.

        Nodes with H < 0 bound mu from above; None when no power of two fits.
        """
        geo = snapshot.require_geometry()
        H = geo.mean_curvature
        need = -_shifted_normal_part(snapshot, np.asarray(q0, dtype=float))
        if np.any((H == 0.0) & (need > 0.0)):
            return None
        lower = np.max(need[H > 0.0] / H[H > 0.0]) if np.any(H > 0.0) else 0.0
        upper = np.min(need[H < 0.0] / H[H < 0.0]) if np.any(H < 0.0) else np.inf
        for power in range(MAX_MU_POWER + 1):
            mu = 2.0 ** power
            if lower <= mu <= upper:
                return mu
        return None

    @staticmethod
    def nondecreasing_mu(snapshot: HypersurfaceSnapshot, q0: Sequence[float] = (0.0, 0.0)) -> float:
        """Largest mu with -<x0 - q0, nu> >= mu H >= 0 at every node, 0 if there is none."""
        geo = snapshot.require_geometry()
        H = geo.mean_curvature
        room = -_shifted_normal_part(snapshot, np.asarray(q0, dtype=float))
        if np.any(H < 0.0) or np.any(room < 0.0):
            return 0.0
        positive = H > 0.0
        if not np.any(positive):
            return float('inf')
        return float(np.min(room[positive] / H[positive]))

    @staticmethod
    def height_shift(snapshot: HypersurfaceSnapshot, q0: Sequence[float] = (0.0, 0.0)) -> HypothesisCheck:
        """
        C = max <x0 - q0, nu> and the shift c1 = max(0, C) sup V with
        <x0 - q0 - c1 w, nu> <= 0.
        """
        geo = snapshot.require_geometry()
        largest = float(np.max(_shifted_normal_part(snapshot, np.asarray(q0, dtype=float))))
        tilt = float(np.max(geo.tilt))
        if not np.isfinite(tilt):
            return HypothesisCheck(Status.INCONCLUSIVE, largest, note='V unbounded: not a graph over w')
        shift = max(0.0, largest) * tilt
        return HypothesisCheck(Status.HOLDS, shift, note=f'C = {largest:.6g}, sup V = {tilt:.6g}')


def extended_surface(profile: ProfileFunction, dimension: int = 2, r_max: float = 1e6,
                   nodes: int = 4000) -> HypersurfaceSnapshot:
    """
    Surface of revolution of an analytic profile on a logarithmic grid
    reaching far beyond a run's truncation, for the growth-condition search.
    """
    r = np.concatenate([[0.0], np.geomspace(1e-3, r_max, nodes - 1)])
    rep = Representation(RepresentationKind.REVOLUTION_PROFILE, dimension=dimension, start_on_axis=True,
                         parametrization=profile.parametrization(r))
    return compute_geometry(HypersurfaceSnapshot(rep, profile.nodes(r)))


def admissibility_report(
    snapshot: HypersurfaceSnapshot,
    q0: Sequence[float] = (0.0, 0.0),
    extended: Optional[HypersurfaceSnapshot] = None,
    radii: Optional[Sequence[float]] = None
) -> AdmissibilityReport:
    """
    Check the hypotheses on initial data node-wise.

    Args:
        snapshot: Initial snapshot (geometry computed if missing)
        q0: Center for the mu conditions
        extended: Optional extended snapshot of the same data for the growth search
        radii: Radius ladder for the volume growth fit

    Returns:
        AdmissibilityReport keyed by hypothesis name
    """
    snapshot = ensure_geometry(snapshot)
    geo = snapshot.require_geometry()
    checker = AdmissibilityChecker
    report = AdmissibilityReport()

    growth_source = ensure_geometry(extended) if extended is not None else snapshot
    report.checks['growth_condition'] = checker.growth_condition(growth_source)
    if extended is not None:
        report.checks['growth_condition'].note += ' (extended surface)'

    report.checks['initial_mass_finite'] = checker.initial_mass_finite(snapshot)

    non_positive = np.flatnonzero(geo.mean_curvature <= 0.0)
    report.checks['mean_convex'] = HypothesisCheck(
        Status.HOLDS if len(non_positive) == 0 else Status.FAILS,
        float(np.min(geo.mean_curvature)), non_positive[:20].tolist())

    mu = checker.convergent_mu(snapshot, q0)
    report.checks['convergent_mu'] = HypothesisCheck(
        Status.HOLDS if mu is not None else Status.FAILS, mu,
        note='smallest power of two with mu H >= -<x0 - q0, nu>')

    mu_max = checker.nondecreasing_mu(snapshot, q0)
    report.checks['nondecreasing_mu'] = HypothesisCheck(
        Status.HOLDS if mu_max > 0.0 else Status.FAILS, mu_max,
        note='largest mu with -<x0 - q0, nu> >= mu H >= 0')

    report.checks['linear_growth'] = HypothesisCheck(
        Status.HOLDS if np.all(np.isfinite(geo.tilt)) else Status.FAILS, float(np.max(geo.tilt)),
        np.flatnonzero(~np.isfinite(geo.tilt))[:20].tolist(), note='sup V')
    report.checks['height_shift'] = checker.height_shift(snapshot, q0)

    if not _is_compact(snapshot):
        reach = float(np.sqrt(np.max(snapshot.radius_sq)))
        ladder = radii if radii is not None else np.geomspace(max(1.0, reach / 16.0), reach, 5)
        exponent, constant = volume_growth_exponent(snapshot, ladder)
        report.checks['volume_growth'] = HypothesisCheck(
            Status.HOLDS if np.isfinite(exponent) else Status.INCONCLUSIVE, exponent,
            note=f'area(B_R) ~ {constant:.4g} R^m')

    logger.info("Admissibility: %s",
                ', '.join(f"{name}={check.status.value}" for name, check in report.checks.items()))
    return report
