"""Shared fixtures: small snapshots with cached geometry."""

import numpy as np
import pytest

from geometry.compute import compute_geometry
from geometry.representation import Representation, RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot


def make_circle(radius: float = 1.0, nodes: int = 64, center=(0.0, 0.0),
                clock: Clock = Clock.T) -> HypersurfaceSnapshot:
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    points = np.asarray(center) + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    rep = Representation(RepresentationKind.PLANAR_CURVE, closed=True)
    return compute_geometry(HypersurfaceSnapshot(rep, points, clock=clock))


def make_sphere_profile(radius: float = 1.0, nodes: int = 65, dimension: int = 2) -> HypersurfaceSnapshot:
    theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, nodes)
    points = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    points[0, 0] = points[-1, 0] = 0.0
    rep = Representation(RepresentationKind.REVOLUTION_PROFILE, dimension=dimension,
                         start_on_axis=True, end_on_axis=True)
    return compute_geometry(HypersurfaceSnapshot(rep, points))


def make_graph(heights, r_max: float = 10.0, dimension: int = 2, clock: Clock = Clock.S) -> HypersurfaceSnapshot:
    heights = np.asarray(heights, dtype=float)
    r = np.linspace(0.0, r_max, len(heights))
    rep = Representation(RepresentationKind.RADIAL_GRAPH, dimension=dimension, start_on_axis=True)
    return compute_geometry(HypersurfaceSnapshot(rep, np.column_stack([r, heights]), clock=clock))


@pytest.fixture
def unit_circle() -> HypersurfaceSnapshot:
    return make_circle()


@pytest.fixture
def unit_sphere() -> HypersurfaceSnapshot:
    return make_sphere_profile()


@pytest.fixture
def flat_graph() -> HypersurfaceSnapshot:
    return make_graph(np.zeros(101))


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    """Isolated output root, also exported through the environment."""
    root = tmp_path / 'runs'
    monkeypatch.setenv('MCF_LAB_OUTPUT_ROOT', str(root))
    return root
