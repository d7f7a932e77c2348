"""
Flow variants, gauges, boundary treatments and run state.
"""

import numpy as np
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional

from core.config import FLOW_DEFAULTS
from core.constants import flow_equation
from geometry.representation import RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot


class FlowVariant(Enum):
    """The four evolution equations."""
    MCF = 'mcf'
    DRIFTING_MCF = 'drifting_mcf'
    NORMALIZED_MCF = 'normalized_mcf'
    NORMALIZED_DRIFTING_MCF = 'normalized_drifting_mcf'

    @property
    def clock(self) -> Clock:
        return Clock.S if self.normalized else Clock.T

    @property
    def normalized(self) -> bool:
        return self in (FlowVariant.NORMALIZED_MCF, FlowVariant.NORMALIZED_DRIFTING_MCF)

    @property
    def drifting(self) -> bool:
        return self in (FlowVariant.DRIFTING_MCF, FlowVariant.NORMALIZED_DRIFTING_MCF)


class Gauge(Enum):
    PARAMETRIC = 'parametric'
    GRAPHICAL = 'graphical'


class BoundaryKind(Enum):
    """
    Treatment of open ends.

    PERIODIC: closed curves. ASYMPTOTIC_CLAMP: ghost values follow the
    initial far-field slope (parametric gauge extrapolates the end velocity
    linearly). FIXED_DIRICHLET: end nodes frozen. SCALED_FAR_FIELD: graph
    end node and ghosts follow the initial profile transported by the
    similarity scaling, e^{-s} u0(r e^s), or u0(r) on the t clock.
    """
    PERIODIC = 'periodic'
    ASYMPTOTIC_CLAMP = 'asymptotic_clamp'
    FIXED_DIRICHLET = 'fixed_dirichlet'
    SCALED_FAR_FIELD = 'scaled_far_field'


def parse_enum(enum_cls, value):
    """Enum member from its value or name, case-insensitive."""
    if isinstance(value, enum_cls):
        return value
    key = str(value).strip().lower()
    for member in enum_cls:
        if member.value == key or member.name.lower() == key:
            return member
    raise ValueError(f"Unknown {enum_cls.__name__}: {value}")


@dataclass
class FlowSpec:
    """Flow variant, gauge, step control and boundary treatment."""
    variant: FlowVariant = FlowVariant.MCF
    gauge: Gauge = Gauge.PARAMETRIC
    boundary: BoundaryKind = BoundaryKind.PERIODIC
    cfl: float = FLOW_DEFAULTS['cfl']
    max_step: float = FLOW_DEFAULTS['max_step']
    max_time: float = 1.0
    curvature_ceiling: float = FLOW_DEFAULTS['curvature_ceiling']
    blowup_product: float = FLOW_DEFAULTS['blowup_product']
    mesh_floor: float = FLOW_DEFAULTS['mesh_floor']
    gradient_bound: float = FLOW_DEFAULTS['gradient_bound']
    max_halvings: int = FLOW_DEFAULTS['max_halvings']
    # Initial profile u0(r) for SCALED_FAR_FIELD
    far_field: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    @property
    def clock(self) -> Clock:
        return self.variant.clock

    def validate(self, snapshot: HypersurfaceSnapshot) -> None:
        """
        Check the flow settings against a snapshot.

        Raises:
            ValueError: inconsistent clock, gauge, boundary or step control
        """
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"CFL factor must lie in (0, 1], got {self.cfl}")
        if self.max_step <= 0.0 or self.max_time <= 0.0:
            raise ValueError("max_step and max_time must be positive")
        if snapshot.clock != self.clock:
            raise ValueError(
                f"{self.variant.value} runs on clock {self.clock.value}, snapshot is on {snapshot.clock.value}")
        kind = snapshot.kind
        if self.gauge == Gauge.GRAPHICAL and kind != RepresentationKind.RADIAL_GRAPH:
            raise ValueError("Graphical gauge requires a RadialGraph snapshot")
        if self.gauge == Gauge.PARAMETRIC and kind == RepresentationKind.RADIAL_GRAPH:
            raise ValueError("A RadialGraph has a fixed grid; evolve it in graphical gauge")
        closed = snapshot.representation.closed
        if closed != (self.boundary == BoundaryKind.PERIODIC):
            raise ValueError(f"Boundary {self.boundary.value} does not match a {'closed' if closed else 'open'} snapshot")
        if self.boundary == BoundaryKind.SCALED_FAR_FIELD:
            if self.gauge != Gauge.GRAPHICAL:
                raise ValueError("scaled_far_field boundary is only available in graphical gauge")
            if self.far_field is None:
                raise ValueError("scaled_far_field boundary needs the initial profile")

    def describe(self) -> Dict[str, object]:
        return {
            'variant': self.variant.value,
            'gauge': self.gauge.value,
            'boundary': self.boundary.value,
            'clock': self.clock.value,
            'cfl': self.cfl,
            'max_step': self.max_step,
            'max_time': self.max_time,
            'equation': flow_equation(self.variant.value),
        }


@dataclass
class FlowDiagnostics:
    max_curvature_sq: float
    min_edge: float
    last_step: float
    max_slope: float = 0.0


@dataclass
class FlowState:
    """Current snapshot plus step counter and diagnostics."""
    snapshot: HypersurfaceSnapshot
    step: int
    clock: float
    diagnostics: FlowDiagnostics
    rejected_steps: int = 0
    curvature_scale: float = 1.0    # max(initial max|A|^2, 1); multiplies the curvature ceiling
