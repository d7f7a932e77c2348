"""
Flow specs, the time stepper, rescaling and gauge equivalence.
"""

from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_circle, make_graph, make_sphere_profile
from core.errors import FiniteTimeSingularity, GaugeLoss, MeshCollapse
from flow.engine import advance, evolve, initial_state
from flow.equivalence import run_equivalence
from flow.flow_spec import BoundaryKind, FlowSpec, FlowVariant, Gauge, parse_enum
from flow.graph_equation import graph_rhs, uniform_spacing
from flow.rescaling import (
    mu_rescale, physical_clock, similarity_clock, to_similarity_variables, type_iii_product,
)
from geometry.closed_forms import rescaled_circle_radius, shrinking_sphere_radius
from geometry.compute import compute_geometry
from geometry.snapshot import Clock

CIRCLE_MCF = FlowSpec(variant=FlowVariant.MCF, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.PERIODIC)


def mean_radius(snapshot, center=(0.0, 0.0)) -> float:
    return float(np.mean(np.linalg.norm(snapshot.nodes - np.asarray(center), axis=1)))


class TestFlowSpec:

    def test_parse_enum_accepts_values_and_names(self):
        assert parse_enum(FlowVariant, 'drifting_mcf') == FlowVariant.DRIFTING_MCF
        assert parse_enum(FlowVariant, 'NORMALIZED_MCF') == FlowVariant.NORMALIZED_MCF
        with pytest.raises(ValueError):
            parse_enum(Gauge, 'spectral')

    def test_variant_clocks(self):
        assert FlowVariant.MCF.clock == Clock.T
        assert FlowVariant.DRIFTING_MCF.clock == Clock.T
        assert FlowVariant.NORMALIZED_MCF.clock == Clock.S
        assert FlowVariant.NORMALIZED_DRIFTING_MCF.clock == Clock.S

    def test_validate_rejects_inconsistent_specs(self, unit_circle, flat_graph):
        with pytest.raises(ValueError):
            replace(CIRCLE_MCF, cfl=0.0).validate(unit_circle)
        with pytest.raises(ValueError):
            replace(CIRCLE_MCF, gauge=Gauge.GRAPHICAL).validate(unit_circle)
        with pytest.raises(ValueError):
            replace(CIRCLE_MCF, boundary=BoundaryKind.FIXED_DIRICHLET).validate(unit_circle)
        with pytest.raises(ValueError):
            replace(CIRCLE_MCF, variant=FlowVariant.NORMALIZED_MCF).validate(unit_circle)
        graph_spec = FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=Gauge.PARAMETRIC,
                              boundary=BoundaryKind.ASYMPTOTIC_CLAMP)
        with pytest.raises(ValueError):
            graph_spec.validate(flat_graph)
        with pytest.raises(ValueError):
            replace(graph_spec, gauge=Gauge.GRAPHICAL, boundary=BoundaryKind.SCALED_FAR_FIELD).validate(flat_graph)

    def test_describe_names_the_equation(self):
        description = CIRCLE_MCF.describe()
        assert description['variant'] == 'mcf'
        assert description['clock'] == 't'
        assert 'Mean curvature flow' in description['equation']


class TestParametricEngine:

    def test_initial_state_attaches_labels(self, unit_circle):
        state = initial_state(unit_circle)
        assert state.step == 0
        np.testing.assert_array_equal(state.snapshot.labels, np.arange(unit_circle.node_count))
        np.testing.assert_array_equal(state.snapshot.x0, unit_circle.nodes)

    @pytest.mark.parametrize('variant', [FlowVariant.MCF, FlowVariant.DRIFTING_MCF])
    def test_circle_shrinks_like_closed_form(self, unit_circle, variant):
        final = evolve(unit_circle, replace(CIRCLE_MCF, variant=variant), 0.1)
        assert final.clock == pytest.approx(0.1, abs=1e-14)
        assert mean_radius(final.snapshot) == pytest.approx(float(shrinking_sphere_radius(0.1)), rel=1e-3)
        np.testing.assert_array_equal(final.snapshot.labels, np.arange(unit_circle.node_count))

    def test_advance_yields_increasing_clocks(self, unit_circle):
        states = list(advance(unit_circle, CIRCLE_MCF, 0.02))
        clocks = [state.clock for state in states]
        assert clocks[0] == 0.0
        assert np.all(np.diff(clocks) > 0.0)
        assert [state.step for state in states] == list(range(len(states)))
        assert clocks[-1] == pytest.approx(0.02, abs=1e-14)

    def test_circle_singularity_is_typed(self, unit_circle):
        spec = replace(CIRCLE_MCF, curvature_ceiling=4.0)
        with pytest.raises(FiniteTimeSingularity) as info:
            evolve(unit_circle, spec, 0.5)
        # max|A|^2 = 1 / (1 - 2t) passes 4 at t = 3/8
        assert info.value.clock == pytest.approx(0.375, abs=5e-3)
        assert info.value.signal == 'FiniteTimeSingularity'
        assert info.value.diagnostics['max_curvature_sq'] > 4.0

    def test_curvature_ceiling_scales_with_initial_curvature(self):
        small = make_circle(0.5, nodes=64)
        assert initial_state(small).curvature_scale == pytest.approx(4.0, rel=1e-2)
        assert initial_state(make_circle(2.0, nodes=64)).curvature_scale == 1.0
        spec = replace(CIRCLE_MCF, curvature_ceiling=4.0)
        with pytest.raises(FiniteTimeSingularity) as info:
            evolve(small, spec, 0.125)
        # max|A|^2 = 1 / (1/4 - 2t) passes 16 at t = 3/32
        assert info.value.clock == pytest.approx(0.09375, abs=5e-3)

    def test_mesh_floor_is_typed(self, unit_circle):
        spec = replace(CIRCLE_MCF, mesh_floor=0.09)
        with pytest.raises(MeshCollapse):
            evolve(unit_circle, spec, 0.2)

    def test_sphere_shrinks_like_closed_form(self):
        sphere = make_sphere_profile(nodes=33)
        spec = FlowSpec(variant=FlowVariant.MCF, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.FIXED_DIRICHLET)
        final = evolve(sphere, spec, 0.05)
        expected = float(shrinking_sphere_radius(0.05, 1.0, 2))
        assert mean_radius(final.snapshot) == pytest.approx(expected, rel=5e-3)
        assert final.snapshot.nodes[0, 0] == 0.0
        assert final.snapshot.nodes[-1, 0] == 0.0

    def test_rescaled_circle_under_normalized_drifting_flow(self):
        circle = make_circle(1.0, nodes=64, clock=Clock.S)
        spec = replace(CIRCLE_MCF, variant=FlowVariant.NORMALIZED_DRIFTING_MCF)
        final = evolve(circle, spec, 0.05)
        assert mean_radius(final.snapshot) == pytest.approx(float(rescaled_circle_radius(0.05)), rel=1e-3)


class TestGraphicalEngine:

    def test_graph_rhs_vanishes_on_planes_through_origin(self):
        r = np.linspace(0.0, 5.0, 51)
        rhs = graph_rhs(r, np.zeros_like(r), 2, True, np.zeros(2), uniform_spacing(r))
        np.testing.assert_allclose(rhs, 0.0, atol=1e-15)

    def test_graph_rhs_on_cone(self):
        r = np.linspace(0.0, 5.0, 51)
        h = uniform_spacing(r)
        # u = r is a cone: only the rotational term (n - 1) u_r / r survives away from the axis
        rhs = graph_rhs(r, r.copy(), 2, False, r[-1] + h * np.array([1.0, 2.0]), h)
        np.testing.assert_allclose(rhs[1:], 1.0 / r[1:], rtol=1e-10)

    def test_uniform_spacing_rejects_bad_grids(self):
        from core.errors import GeometryError
        with pytest.raises(GeometryError):
            uniform_spacing(np.array([0.0, 1.0, 3.0]))

    def test_flat_plane_is_stationary(self, flat_graph):
        spec = FlowSpec(variant=FlowVariant.NORMALIZED_DRIFTING_MCF, gauge=Gauge.GRAPHICAL,
                        boundary=BoundaryKind.ASYMPTOTIC_CLAMP)
        final = evolve(flat_graph, spec, 0.05)
        np.testing.assert_allclose(final.snapshot.nodes[:, 1], 0.0, atol=1e-14)
        assert final.diagnostics.max_slope == pytest.approx(0.0, abs=1e-14)

    def test_gradient_bound_is_typed(self):
        r = np.linspace(0.0, 5.0, 51)
        steep = make_graph(np.sqrt(1.0 + 9.0 * r ** 2), r_max=5.0, clock=Clock.T)
        spec = FlowSpec(variant=FlowVariant.MCF, gauge=Gauge.GRAPHICAL,
                        boundary=BoundaryKind.ASYMPTOTIC_CLAMP, gradient_bound=2.0)
        with pytest.raises(GaugeLoss):
            evolve(steep, spec, 0.1)


class TestRescaling:

    @given(t=st.floats(min_value=0.0, max_value=1e3))
    def test_clocks_are_inverse(self, t):
        assert float(physical_clock(similarity_clock(t))) == pytest.approx(t, rel=1e-12, abs=1e-14)

    def test_mu_rescale_transforms_cached_geometry(self, unit_circle):
        rescaled = mu_rescale(unit_circle, 4.0)
        recomputed = compute_geometry(rescaled.with_nodes(rescaled.nodes, rescaled.time))
        np.testing.assert_allclose(rescaled.geometry.mean_curvature, recomputed.geometry.mean_curvature, rtol=1e-10)
        np.testing.assert_allclose(rescaled.geometry.area_element, recomputed.geometry.area_element, rtol=1e-10)
        np.testing.assert_allclose(rescaled.geometry.normal_part, 0.5, rtol=1e-12)

    def test_mu_rescale_rejects_off_axis_center(self, unit_sphere):
        with pytest.raises(ValueError):
            mu_rescale(unit_sphere, 2.0, q0=(1.0, 0.0))
        with pytest.raises(ValueError):
            mu_rescale(unit_sphere, -1.0)

    @pytest.mark.parametrize('mu', [0.25, 4.0])
    def test_mcf_commutes_with_mu_rescaling(self, mu):
        circle = make_circle(1.0, nodes=64, center=(0.3, -0.2))
        horizon = 0.1
        flowed_then_scaled = mu_rescale(evolve(circle, CIRCLE_MCF, horizon).snapshot, mu)
        scaled_then_flowed = evolve(mu_rescale(circle, mu), CIRCLE_MCF, horizon / mu).snapshot
        assert scaled_then_flowed.time == pytest.approx(flowed_then_scaled.time)
        np.testing.assert_allclose(scaled_then_flowed.nodes, flowed_then_scaled.nodes,
                                   atol=1e-4 / np.sqrt(mu))

    def test_similarity_variables(self):
        circle = make_circle(1.0)
        moved = circle.with_nodes(circle.nodes * 0.8, 0.18)
        rescaled = to_similarity_variables(moved)
        assert rescaled.clock == Clock.S
        assert rescaled.time == pytest.approx(0.5 * np.log(1.36))
        assert mean_radius(rescaled) == pytest.approx(0.8 / np.sqrt(1.36))
        with pytest.raises(ValueError):
            to_similarity_variables(rescaled)

    def test_type_iii_product_agrees_across_clocks(self):
        t = 0.75
        s = float(similarity_clock(t))
        physical = 3.0
        assert type_iii_product(physical, t, Clock.T) == pytest.approx(
            type_iii_product(physical * (2.0 * t + 1.0), s, Clock.S))


class TestGaugeEquivalence:

    def test_mcf_and_drifting_mcf_share_images(self):
        circle = make_circle(1.0, nodes=64, center=(0.3, -0.2))
        distance, mean_edge = run_equivalence(circle, CIRCLE_MCF, 0.1)
        # Tangential drift slides nodes along the curve, never off it
        assert distance < 0.6 * mean_edge
