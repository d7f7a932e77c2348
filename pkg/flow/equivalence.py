"""
Image comparison of MCF and drifting MCF runs.

The two flows differ by tangential diffeomorphisms only, so their node sets
sample the same curve at equal clocks.
"""

import logging

import numpy as np
from dataclasses import replace
from scipy.spatial.distance import directed_hausdorff
from typing import Tuple

from core.errors import FlowTermination, MonitorError
from flow.engine import evolve
from flow.flow_spec import FlowSpec, FlowState, FlowVariant, Gauge
from geometry.snapshot import HypersurfaceSnapshot

logger = logging.getLogger(__name__)


def reparametrization_equivalence_check(run_a: FlowState, run_b: FlowState, horizon: float = None) -> float:
    """
    Symmetric Hausdorff distance between the final node sets of two runs.

    Args:
        run_a: Final state of the MCF run
        run_b: Final state of the drifting MCF run
        horizon: Clock both runs must have reached

    Raises:
        MonitorError: the runs stopped at different clocks or before the horizon
    """
    target = run_a.clock if horizon is None else horizon
    for name, state in (('MCF', run_a), ('drifting MCF', run_b)):
        if abs(state.clock - target) > 1e-12 * max(1.0, abs(target)):
            raise MonitorError(f"{name} run stopped at clock {state.clock:.6g} before the horizon {target:.6g}")
    a = run_a.snapshot.nodes
    b = run_b.snapshot.nodes
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def run_equivalence(snapshot: HypersurfaceSnapshot, spec: FlowSpec, horizon: float) -> Tuple[float, float]:
    """
    Evolve one snapshot under MCF and drifting MCF and compare the images.

    Returns:
        Tuple of (image distance, mean edge length of the MCF run)
    """
    states = []
    for variant in (FlowVariant.MCF, FlowVariant.DRIFTING_MCF):
        run_spec = replace(spec, variant=variant, gauge=Gauge.PARAMETRIC)
        try:
            states.append(evolve(snapshot, run_spec, horizon))
        except FlowTermination as exc:
            raise MonitorError(f"{variant.value} run died before the horizon: {exc}")
    distance = reparametrization_equivalence_check(states[0], states[1], horizon)
    mean_edge = float(np.mean(states[0].snapshot.require_geometry().segment_lengths))
    logger.info("Gauge equivalence at clock %.4g: distance %.3e, mean edge %.3e", horizon, distance, mean_edge)
    return distance, mean_edge
