"""
Weights for the monitored integrals, evaluated as exponents.

Each weight is a product of factors; factors are combined in log form so
that e^{|x~|^2/2} and e^{-|x0|^2} never overflow separately.
"""

import numpy as np
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from core.errors import QuadratureError
from geometry.snapshot import Clock, HypersurfaceSnapshot


class WeightKind(Enum):
    UNIT = 'unit'                                              # 1
    EXPANDER_DENSITY = 'expander_density'                      # (t+1/2)^{-n/2} e^{|x|^2/(4(t+1/2))}
    NORMALIZED_EXPANDER_DENSITY = 'normalized_expander_density'  # e^{|x~|^2/2}
    INITIAL_GAUSSIAN = 'initial_gaussian'                      # e^{-|x0|^2}
    HALF_INITIAL_GAUSSIAN = 'half_initial_gaussian'            # e^{-|x0|^2/2}
    CURRENT_HALF_GAUSSIAN = 'current_half_gaussian'            # e^{-|x~|^2/2}
    CUSTOM = 'custom'                                          # tabulated f0 per material point


@dataclass(frozen=True)
class WeightChoice:
    """Product of weight factors; CUSTOM needs positive per-node values."""
    factors: Tuple[WeightKind, ...] = (WeightKind.UNIT,)
    custom: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if WeightKind.CUSTOM in self.factors:
            if self.custom is None:
                raise QuadratureError("Custom weight needs tabulated values f0")
            values = np.asarray(self.custom, dtype=float)
            if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
                raise QuadratureError("Custom weight f0 must be finite and positive everywhere")

    @property
    def name(self) -> str:
        return '*'.join(kind.value for kind in self.factors)

    @classmethod
    def parse(cls, text: str) -> 'WeightChoice':
        """Weight from 'kind' or 'kind*kind' notation."""
        try:
            kinds = tuple(WeightKind(part.strip().lower()) for part in str(text).split('*') if part.strip())
        except ValueError:
            raise ValueError(f"Unknown weight: {text}")
        return cls(factors=kinds or (WeightKind.UNIT,))

    @classmethod
    def unit(cls) -> 'WeightChoice':
        return cls((WeightKind.UNIT,))

    @classmethod
    def relative_mass(cls) -> 'WeightChoice':
        """e^{|x~|^2/2 - |x0|^2}, the integrand bounded by C0."""
        return cls((WeightKind.NORMALIZED_EXPANDER_DENSITY, WeightKind.INITIAL_GAUSSIAN))


def log_weight(snapshot: HypersurfaceSnapshot, weight: WeightChoice) -> np.ndarray:
    """
    Exponent of the weight per node.

    Raises:
        QuadratureError: density factor used on the wrong clock, or custom
            values of the wrong length
    """
    x_sq = snapshot.radius_sq
    x0_sq = np.sum(snapshot.x0 ** 2, axis=1)
    total = np.zeros(snapshot.node_count)
    for kind in weight.factors:
        if kind == WeightKind.UNIT:
            continue
        if kind == WeightKind.EXPANDER_DENSITY:
            if snapshot.clock != Clock.T:
                raise QuadratureError("The expander density rho lives on the t clock")
            shifted = snapshot.time + 0.5
            total += -0.5 * snapshot.dimension * np.log(shifted) + x_sq / (4.0 * shifted)
        elif kind == WeightKind.NORMALIZED_EXPANDER_DENSITY:
            total += 0.5 * x_sq
        elif kind == WeightKind.INITIAL_GAUSSIAN:
            total -= x0_sq
        elif kind == WeightKind.HALF_INITIAL_GAUSSIAN:
            total -= 0.5 * x0_sq
        elif kind == WeightKind.CURRENT_HALF_GAUSSIAN:
            total -= 0.5 * x_sq
        elif kind == WeightKind.CUSTOM:
            values = np.asarray(weight.custom, dtype=float)
            if len(values) != snapshot.node_count:
                raise QuadratureError(
                    f"Custom weight has {len(values)} values for {snapshot.node_count} nodes")
            total += np.log(values)
    return total
