"""
Functional series and the verdicts drawn from them.
"""

import logging
from enum import Enum

import numpy as np
import pandas as pd
from dataclasses import dataclass, field
from scipy.integrate import cumulative_trapezoid
from typing import Dict, List, Optional, Sequence, Tuple

from core.config import TOLERANCES
from core.errors import MonitorError

logger = logging.getLogger(__name__)


class Verdict(Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    INCONCLUSIVE = 'INCONCLUSIVE'


class Direction(Enum):
    NON_INCREASING = 'non_increasing'
    NON_DECREASING = 'non_decreasing'


SERIES_COLUMNS = ['clock', 'value', 'truncation', 'excluded_fraction']


@dataclass
class FunctionalSeries:
    """
    Samples of one monitored scalar along a run.

    Clocks are strictly increasing and values finite; append enforces both.
    """
    name: str
    weight: str = 'unit'
    clocks: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    truncations: List[float] = field(default_factory=list)
    excluded_fractions: List[float] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.clocks)

    def append(self, clock: float, value: float, truncation: float = float('inf'),
               excluded_fraction: float = 0.0) -> None:
        if not np.isfinite(value):
            raise MonitorError(f"{self.name}: non-finite value {value} at clock {clock:.6g}")
        if self.clocks and clock <= self.clocks[-1]:
            raise MonitorError(f"{self.name}: clock {clock:.6g} does not increase past {self.clocks[-1]:.6g}")
        self.clocks.append(float(clock))
        self.values.append(float(value))
        self.truncations.append(float(truncation))
        self.excluded_fractions.append(float(excluded_fraction))

    @property
    def clock_array(self) -> np.ndarray:
        return np.asarray(self.clocks, dtype=float)

    @property
    def value_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def flagged(self) -> bool:
        """True when some sample lost more than the allowed weight to overflow."""
        return any(f > TOLERANCES['excluded_fraction'] for f in self.excluded_fractions)

    def window(self, start: float, stop: float) -> np.ndarray:
        clocks = self.clock_array
        return self.value_array[(clocks >= start) & (clocks <= stop)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'clock': self.clocks,
            'value': self.values,
            'truncation': self.truncations,
            'excluded_fraction': self.excluded_fractions,
        }, columns=SERIES_COLUMNS)

    @classmethod
    def from_frame(cls, name: str, frame: pd.DataFrame, weight: str = 'unit') -> 'FunctionalSeries':
        series = cls(name=name, weight=weight)
        for row in frame.itertuples(index=False):
            series.append(row.clock, row.value, row.truncation, row.excluded_fraction)
        return series


@dataclass(frozen=True)
class MonotonicityResult:
    verdict: Verdict
    worst_violation: float     # Largest wrong-way step relative to |value| + 1, 0 if none
    worst_clock: Optional[float]
    samples: int

    def to_dict(self) -> Dict[str, object]:
        return {
            'verdict': self.verdict.value,
            'worst_violation': self.worst_violation,
            'worst_clock': self.worst_clock,
            'samples': self.samples,
        }


def monotonicity_verdict(series: FunctionalSeries, direction: Direction,
                         tol: float = None) -> MonotonicityResult:
    """
    Check every consecutive difference against the direction.

    A step violates when it moves the wrong way by more than
    tol * (|value| + 1). Fewer than 5 samples, or overflow-flagged samples,
    give INCONCLUSIVE.
    """
    tol = TOLERANCES['tol_mono'] if tol is None else tol
    values = series.value_array
    if len(values) < 5:
        return MonotonicityResult(Verdict.INCONCLUSIVE, 0.0, None, len(values))

    steps = np.diff(values)
    if direction == Direction.NON_DECREASING:
        steps = -steps
    # Positive entries move the wrong way
    relative = steps / (np.abs(values[:-1]) + 1.0)
    worst = int(np.argmax(relative))
    worst_violation = max(float(relative[worst]), 0.0)
    worst_clock = float(series.clocks[worst + 1]) if worst_violation > 0.0 else None

    if worst_violation > tol:
        verdict = Verdict.FAIL
    elif series.flagged:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.PASS
    logger.debug("%s %s: %s (worst %.3e)", series.name, direction.value, verdict.value, worst_violation)
    return MonotonicityResult(verdict, worst_violation, worst_clock, len(values))


def slope_identity_mismatch(mass: FunctionalSeries, deficit: FunctionalSeries) -> float:
    """
    Relative mismatch between the finite-difference slope of a weighted mass
    and minus its weighted deficit, sampled at the same clocks.

    Raises:
        MonitorError: the series are not sampled together or are too short
    """
    if len(mass) < 3 or mass.clocks != deficit.clocks:
        raise MonitorError("Slope identity needs mass and deficit sampled at the same >= 3 clocks")
    slope = np.gradient(mass.value_array, mass.clock_array, edge_order=2)
    target = -deficit.value_array
    scale = max(float(np.max(np.abs(target))), 1e-12 * float(np.max(np.abs(mass.value_array))))
    if scale == 0.0:
        return float(np.max(np.abs(slope)))
    return float(np.max(np.abs(slope - target))) / scale


@dataclass(frozen=True)
class DeficitVanishingResult:
    verdict: Verdict
    ratio: float                          # Mean of the last window over mean of the first
    tail_integrals: List[float]           # Integral of the deficit over [s_k, end]
    vanishing_clocks: List[float]         # First clocks below decreasing thresholds
    annulus_floor: Optional[float] = None
    annulus_min_final: Optional[float] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            'verdict': self.verdict.value,
            'ratio': self.ratio,
            'tail_integral_start': self.tail_integrals[0] if self.tail_integrals else None,
            'vanishing_clocks': list(self.vanishing_clocks),
            'annulus_floor': self.annulus_floor,
            'annulus_min_final': self.annulus_min_final,
        }


def deficit_vanishing_check(
    deficit: FunctionalSeries,
    window: Optional[float] = None,
    annulus: Optional[FunctionalSeries] = None,
    floor: Optional[float] = None,
    ratio: float = None
) -> DeficitVanishingResult:
    """
    Decide whether a weighted deficit dies out along a normalized run.

    PASS iff the mean deficit over the last window is at most `ratio` times
    the mean over the first window and, when an annulus residual series and
    a floor are given, the annulus residual drops below the floor somewhere
    in the last window.

    Args:
        deficit: Deficit series on the s clock
        window: Width of the first/last windows, a third of the span by default
        annulus: Series of sup |H + <x,nu>| over an annulus
        floor: Positive lower bound the annulus residual must break
        ratio: Required decay ratio

    Raises:
        MonitorError: run too short
    """
    ratio = TOLERANCES['vanishing_ratio'] if ratio is None else ratio
    clocks = deficit.clock_array
    values = deficit.value_array
    if len(values) < 6 or clocks[-1] <= clocks[0]:
        raise MonitorError(f"{deficit.name}: run too short for a vanishing check ({len(values)} samples)")
    span = clocks[-1] - clocks[0]
    window = span / 3.0 if window is None else window
    if window <= 0.0 or 2.0 * window > span + 1e-12:
        raise MonitorError(f"{deficit.name}: run too short for windows of width {window:.3g}")

    first = deficit.window(clocks[0], clocks[0] + window)
    last = deficit.window(clocks[-1] - window, clocks[-1])
    first_mean = float(np.mean(first))
    last_mean = float(np.mean(last))
    measured = last_mean / first_mean if first_mean > 0.0 else 0.0

    total = cumulative_trapezoid(values, clocks, initial=0.0)
    tail = (total[-1] - total).tolist()

    vanishing: List[float] = []
    threshold = first_mean
    for _ in range(6):
        threshold *= 0.1
        hits = np.flatnonzero(values <= threshold)
        if len(hits) == 0:
            break
        vanishing.append(float(clocks[hits[0]]))

    verdict = Verdict.PASS if (first_mean == 0.0 or measured <= ratio) else Verdict.FAIL
    annulus_min = None
    if annulus is not None and floor is not None:
        final = annulus.window(annulus.clocks[-1] - window, annulus.clocks[-1])
        annulus_min = float(np.min(final))
        if annulus_min >= floor:
            verdict = Verdict.FAIL
    logger.info("%s vanishing: ratio %.3e -> %s", deficit.name, measured, verdict.value)
    return DeficitVanishingResult(verdict, measured, tail, vanishing, floor, annulus_min)


def observed_order(spacings: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(spacing)."""
    spacings = np.asarray(spacings, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(spacings) < 2 or np.any(spacings <= 0.0) or np.any(errors <= 0.0):
        raise MonitorError("Order fit needs at least two positive (spacing, error) pairs")
    slope, _ = np.polyfit(np.log(spacings), np.log(errors), 1)
    return float(slope)


def exponential_rate(series: FunctionalSeries) -> Tuple[float, float]:
    """
    Fit value = A e^{-lambda clock} over the positive samples.

    Returns:
        Tuple of (lambda, A)
    """
    values = series.value_array
    keep = values > 0.0
    if np.count_nonzero(keep) < 2:
        raise MonitorError(f"{series.name}: not enough positive samples for a rate fit")
    slope, intercept = np.polyfit(series.clock_array[keep], np.log(values[keep]), 1)
    return float(-slope), float(np.exp(intercept))
