"""
Typed errors and run termination signals.

Errors are raised for bad input or impossible requests. Termination
signals end a running flow with a typed reason; the runner records them
in the report and compares them against the scenario's expected
termination.
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all errors raised by the lab."""


class ConfigError(LabError):
    """Scenario configuration could not be parsed or validated."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        self.path = path
        self.line = line
        self.field = field
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class GeometryError(LabError):
    """Representation invariants are violated (axis degeneracy, folds, ...)."""


class QuadratureError(LabError):
    """Integration window is empty or a weight is invalid."""


class MonitorError(LabError):
    """A monitor cannot produce a verdict from the data it was given."""


class SolverError(LabError):
    """Expander shooting failed."""


class ExpanderBlowup(SolverError):
    """The profile ODE blew up before reaching R_max."""


class ToleranceNotMet(SolverError):
    """Grid refinement did not bring the residual below the tolerance."""


class StepRejected(LabError):
    """A proposed time step produced an unstable or non-finite state."""


class FlowTermination(Exception):
    """
    Base class for typed run termination signals.

    Not a LabError: a termination is a legitimate outcome of a run and may
    be the expected one (e.g. a shrinking circle).
    """

    signal = 'FlowTermination'

    def __init__(self, message: str, clock: float,
                 diagnostics: Optional[Dict[str, Any]] = None):
        self.clock = clock
        self.diagnostics = dict(diagnostics or {})
        super().__init__(f"{self.signal} at clock {clock:.6g}: {message}")


class FiniteTimeSingularity(FlowTermination):
    """Curvature blew up."""

    signal = 'FiniteTimeSingularity'


class MeshCollapse(FlowTermination):
    """Minimum edge length fell below the mesh floor."""

    signal = 'MeshCollapse'


class GaugeLoss(FlowTermination):
    """The graph gradient left the declared bound."""

    signal = 'GaugeLoss'


TERMINATION_SIGNALS = {
    cls.signal: cls for cls in (FiniteTimeSingularity, MeshCollapse, GaugeLoss)
}
