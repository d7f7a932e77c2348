"""
Weights, weighted integrals, series verdicts and pointwise rate identities.
"""

from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_circle, make_graph
from core.errors import MonitorError, QuadratureError
from flow.engine import advance
from flow.flow_spec import BoundaryKind, FlowSpec, FlowVariant, Gauge
from functionals.integrals import (
    area_in_ball, custom_weight_admissibility, density_rate_defect, expander_deficit, huisken_entropy,
    initial_mass, integrate, integrated_density_defect, truncation_sensitivity, volume_growth_exponent,
    weighted_mass, window_radius,
)
from functionals.monitors import sign_monitors
from functionals.pointwise import (
    PointwiseRateSeries, normalized_density_rate, pointwise_density_rate,
)
from functionals.verdicts import (
    Direction, FunctionalSeries, Verdict, deficit_vanishing_check, exponential_rate, monotonicity_verdict,
    observed_order, slope_identity_mismatch,
)
from functionals.weights import WeightChoice, WeightKind, log_weight
from geometry.snapshot import Clock


def make_series(clocks, values, name='mass') -> FunctionalSeries:
    series = FunctionalSeries(name=name)
    for clock, value in zip(clocks, values):
        series.append(clock, value)
    return series


class TestWeights:

    def test_parse_products(self):
        weight = WeightChoice.parse('normalized_expander_density * initial_gaussian')
        assert weight.factors == (WeightKind.NORMALIZED_EXPANDER_DENSITY, WeightKind.INITIAL_GAUSSIAN)
        assert weight == WeightChoice.relative_mass()
        assert weight.name == 'normalized_expander_density*initial_gaussian'
        assert WeightChoice.parse('').factors == (WeightKind.UNIT,)

    def test_parse_rejects_unknown_weight(self):
        with pytest.raises(ValueError):
            WeightChoice.parse('gaussian*unit')

    def test_custom_weight_needs_positive_values(self):
        with pytest.raises(QuadratureError):
            WeightChoice((WeightKind.CUSTOM,))
        with pytest.raises(QuadratureError):
            WeightChoice((WeightKind.CUSTOM,), custom=np.array([1.0, 0.0]))

    def test_custom_weight_length_is_checked(self, unit_circle):
        weight = WeightChoice((WeightKind.CUSTOM,), custom=np.ones(3))
        with pytest.raises(QuadratureError):
            log_weight(unit_circle, weight)

    def test_expander_density_lives_on_t_clock(self):
        circle = make_circle(clock=Clock.S)
        with pytest.raises(QuadratureError):
            log_weight(circle, WeightChoice((WeightKind.EXPANDER_DENSITY,)))

    def test_expander_density_exponent(self, unit_circle):
        exponent = log_weight(unit_circle, WeightChoice((WeightKind.EXPANDER_DENSITY,)))
        np.testing.assert_allclose(exponent, 0.5 * np.log(2.0) + 0.5, rtol=1e-12)

    def test_relative_mass_is_bounded_at_time_zero(self, unit_circle):
        # Current and initial positions coincide: |x|^2/2 - |x0|^2 = -1/2
        np.testing.assert_allclose(log_weight(unit_circle, WeightChoice.relative_mass()), -0.5, rtol=1e-12)


class TestIntegrals:

    def test_unit_mass_is_length(self, unit_circle):
        assert weighted_mass(unit_circle, WeightChoice.unit()).value == pytest.approx(2.0 * np.pi, rel=1e-12)

    @given(radius=st.floats(min_value=0.2, max_value=5.0))
    def test_huisken_entropy_of_circles(self, radius):
        snap = make_circle(radius, nodes=32)
        reference = 0.25 * radius ** 2
        expected = (4.0 * np.pi * reference) ** -0.5 * np.exp(-radius ** 2 / (4.0 * reference)) * 2.0 * np.pi * radius
        assert huisken_entropy(snap, reference).value == pytest.approx(expected, rel=1e-10)

    def test_self_shrinker_entropy(self, unit_circle):
        # The circle of radius sqrt(2T) shrinks to a point at T
        assert huisken_entropy(unit_circle, 0.5).value == pytest.approx(np.sqrt(2.0 * np.pi / np.e), rel=1e-10)

    def test_huisken_entropy_needs_reference_after_clock(self, unit_circle):
        with pytest.raises(ValueError):
            huisken_entropy(unit_circle, 0.0)

    def test_expander_deficit_on_circle(self):
        circle = make_circle(clock=Clock.S)
        # H + <x,nu> = 2 on the unit circle
        assert expander_deficit(circle, WeightChoice.unit()).value == pytest.approx(8.0 * np.pi, rel=1e-12)

    def test_initial_mass(self, unit_circle):
        assert initial_mass(unit_circle).value == pytest.approx(2.0 * np.pi * np.exp(-0.5), rel=1e-12)

    def test_empty_window_raises(self, unit_circle):
        with pytest.raises(QuadratureError):
            weighted_mass(unit_circle, WeightChoice.unit(), truncation=0.5)

    def test_overflow_policy_reports_excluded_weight(self):
        big = make_circle(40.0, nodes=32, clock=Clock.S)
        result = weighted_mass(big, WeightChoice((WeightKind.NORMALIZED_EXPANDER_DENSITY,)))
        assert result.excluded_nodes == 32
        assert result.excluded_fraction == pytest.approx(1.0)
        assert result.value == 0.0
        assert result.flagged

    def test_signed_factors_are_kept(self, unit_circle):
        factor = np.where(unit_circle.nodes[:, 1] >= 0.0, 1.0, -1.0)
        result = integrate(unit_circle, np.zeros(unit_circle.node_count), factor=factor)
        assert result.value == pytest.approx(0.0, abs=1e-12)

    def test_area_growth_of_a_plane(self, flat_graph):
        assert area_in_ball(flat_graph, 3.0) == pytest.approx(np.pi * 9.0, rel=5e-2)
        exponent, _ = volume_growth_exponent(flat_graph, [2.0, 4.0, 8.0])
        assert exponent == pytest.approx(2.0, abs=0.05)

    def test_truncation_sensitivity_of_bounded_surface(self, unit_circle):
        assert truncation_sensitivity(unit_circle, WeightChoice.unit(), 2.0) == 0.0

    def test_custom_weight_admissibility(self, unit_circle):
        f0 = np.exp(-np.sum(unit_circle.x0 ** 2, axis=1))
        result = custom_weight_admissibility(unit_circle, f0)
        assert result.value == pytest.approx(2.0 * np.pi * np.exp(-0.5), rel=1e-3)

    def test_density_defect_integrates_to_zero_on_closed_curves(self):
        centered = make_circle(1.0, nodes=256)
        np.testing.assert_allclose(density_rate_defect(centered), 0.0, atol=1e-3)
        shifted = make_circle(1.0, nodes=256, center=(0.4, 0.0))
        scale = integrate(shifted, log_weight(shifted, WeightChoice((WeightKind.EXPANDER_DENSITY,))),
                          factor=np.abs(density_rate_defect(shifted))).value
        assert scale > 0.1
        assert abs(integrated_density_defect(shifted).value) < 1e-2 * scale

    def test_axis_window_on_a_raised_plane(self):
        raised = make_graph(np.full(101, 6.0))
        np.testing.assert_allclose(window_radius(raised, 'axis'), raised.nodes[:, 0])
        assert np.min(window_radius(raised)) == pytest.approx(6.0)
        zeros = np.zeros(raised.node_count)
        with pytest.raises(QuadratureError):
            integrate(raised, zeros, truncation=5.0)
        assert integrate(raised, zeros, truncation=3.0, measure='axis').value == pytest.approx(np.pi * 9.0, rel=5e-2)
        # A plane is an expander only through the origin: H + <x,nu> = -6 at height 6
        deficit = expander_deficit(raised, WeightChoice.unit(), truncation=3.0, measure='axis')
        assert deficit.value == pytest.approx(36.0 * np.pi * 9.0, rel=5e-2)

    def test_unknown_window_measure(self, unit_circle):
        with pytest.raises(ValueError):
            window_radius(unit_circle, 'height')


class TestFunctionalSeries:

    def test_append_rejects_non_finite_values(self):
        series = FunctionalSeries(name='mass')
        with pytest.raises(MonitorError):
            series.append(0.0, float('nan'))

    def test_append_rejects_non_increasing_clocks(self):
        series = make_series([0.0, 0.1], [1.0, 0.9])
        with pytest.raises(MonitorError):
            series.append(0.1, 0.8)

    def test_frame_keeps_columns(self):
        series = make_series([0.0, 0.5, 1.0], [3.0, 2.0, 1.0])
        frame = series.to_frame()
        assert list(frame.columns) == ['clock', 'value', 'truncation', 'excluded_fraction']
        again = FunctionalSeries.from_frame('mass', frame)
        assert again.values == series.values
        np.testing.assert_array_equal(series.window(0.25, 1.0), [2.0, 1.0])


class TestVerdicts:

    def test_monotone_series_pass(self):
        clocks = np.linspace(0.0, 1.0, 11)
        assert monotonicity_verdict(make_series(clocks, np.exp(-clocks)), Direction.NON_INCREASING).verdict == Verdict.PASS
        assert monotonicity_verdict(make_series(clocks, clocks), Direction.NON_DECREASING).verdict == Verdict.PASS

    def test_wrong_way_step_fails_with_location(self):
        clocks = np.linspace(0.0, 1.0, 11)
        values = np.exp(-clocks)
        values[6] += 0.1
        result = monotonicity_verdict(make_series(clocks, values), Direction.NON_INCREASING)
        assert result.verdict == Verdict.FAIL
        assert result.worst_clock == pytest.approx(0.6)
        assert result.worst_violation > 0.0

    def test_short_series_are_inconclusive(self):
        result = monotonicity_verdict(make_series([0.0, 1.0, 2.0, 3.0], [4.0, 3.0, 2.0, 1.0]), Direction.NON_INCREASING)
        assert result.verdict == Verdict.INCONCLUSIVE

    def test_overflow_flag_makes_pass_inconclusive(self):
        series = make_series(np.arange(5.0), [5.0, 4.0, 3.0, 2.0, 1.0])
        series.append(5.0, 0.5, excluded_fraction=1e-3)
        assert monotonicity_verdict(series, Direction.NON_INCREASING).verdict == Verdict.INCONCLUSIVE

    def test_slope_identity(self):
        clocks = np.linspace(0.0, 2.0, 201)
        mass = make_series(clocks, np.exp(-clocks), 'mass')
        deficit = make_series(clocks, np.exp(-clocks), 'deficit')
        assert slope_identity_mismatch(mass, deficit) < 1e-3
        with pytest.raises(MonitorError):
            slope_identity_mismatch(mass, make_series(clocks[:3], [1.0, 1.0, 1.0]))

    def test_decaying_deficit_vanishes(self):
        clocks = np.linspace(0.0, 6.0, 61)
        result = deficit_vanishing_check(make_series(clocks, np.exp(-clocks), 'deficit'))
        assert result.verdict == Verdict.PASS
        assert result.ratio == pytest.approx(np.exp(-4.0), rel=0.05)
        assert result.tail_integrals[0] == pytest.approx(1.0 - np.exp(-6.0), rel=1e-3)
        assert result.vanishing_clocks[0] == pytest.approx(np.log(10.0 / 0.432), abs=0.15)

    def test_stationary_deficit_fails(self):
        clocks = np.linspace(0.0, 6.0, 61)
        assert deficit_vanishing_check(make_series(clocks, np.ones(61))).verdict == Verdict.FAIL

    def test_annulus_floor_fails_a_decaying_deficit(self):
        clocks = np.linspace(0.0, 6.0, 61)
        deficit = make_series(clocks, np.exp(-clocks), 'deficit')
        annulus = make_series(clocks, np.full(61, 0.2), 'annulus')
        result = deficit_vanishing_check(deficit, annulus=annulus, floor=0.05)
        assert result.verdict == Verdict.FAIL
        assert result.annulus_min_final == pytest.approx(0.2)

    def test_short_runs_raise(self):
        with pytest.raises(MonitorError):
            deficit_vanishing_check(make_series(np.arange(5.0), np.ones(5)))
        with pytest.raises(MonitorError):
            deficit_vanishing_check(make_series(np.arange(10.0), np.ones(10)), window=5.0)

    @given(order=st.floats(min_value=0.5, max_value=4.0))
    def test_observed_order(self, order):
        spacings = np.array([0.1, 0.05, 0.025])
        assert observed_order(spacings, 3.0 * spacings ** order) == pytest.approx(order, rel=1e-9)

    def test_observed_order_needs_positive_pairs(self):
        with pytest.raises(MonitorError):
            observed_order([0.1], [0.01])
        with pytest.raises(MonitorError):
            observed_order([0.1, 0.05], [0.01, 0.0])

    def test_exponential_rate(self):
        clocks = np.linspace(0.0, 3.0, 31)
        rate, amplitude = exponential_rate(make_series(clocks, 3.0 * np.exp(-2.0 * clocks)))
        assert rate == pytest.approx(2.0)
        assert amplitude == pytest.approx(3.0)
        with pytest.raises(MonitorError):
            exponential_rate(make_series([0.0, 1.0], [1.0, -1.0]))


class TestSignMonitors:

    def test_circle(self, unit_circle):
        record = sign_monitors(unit_circle)
        assert record.min_residual == pytest.approx(2.0)
        assert record.min_mean_curvature == pytest.approx(1.0)
        assert record.max_normal_part == pytest.approx(1.0)
        assert record.type_iii == 0.0
        assert record.min_factorization == pytest.approx(0.0, abs=1e-10)

    def test_plane_is_an_expander(self, flat_graph):
        record = sign_monitors(flat_graph, window=5.0, trim_ends=2)
        assert record.max_residual == pytest.approx(0.0, abs=1e-14)
        assert record.max_tilt == pytest.approx(1.0)
        assert set(record.to_dict()) >= {'min_residual', 'type_iii', 'spacing'}


class TestPointwiseIdentities:

    @staticmethod
    def drifting_samples(every: int = 2):
        spec = FlowSpec(variant=FlowVariant.DRIFTING_MCF, gauge=Gauge.PARAMETRIC, boundary=BoundaryKind.PERIODIC)
        return [state.snapshot for state in advance(make_circle(nodes=64), spec, 0.05) if state.step % every == 0]

    def test_density_rate_along_drifting_flow(self):
        samples = self.drifting_samples()
        series = pointwise_density_rate(samples, 7)
        assert len(series.clocks) == len(samples)
        assert series.passes(1e-2)

    def test_needs_three_samples(self, unit_circle):
        with pytest.raises(MonitorError):
            pointwise_density_rate([unit_circle, unit_circle], 0)

    def test_wrong_clock(self):
        with pytest.raises(MonitorError):
            normalized_density_rate(self.drifting_samples(), 0)

    def test_unlabelled_samples(self, unit_circle):
        later = [unit_circle.with_nodes(unit_circle.nodes, t) for t in (0.0, 0.01, 0.02)]
        with pytest.raises(MonitorError):
            pointwise_density_rate([replace(snap, geometry=unit_circle.geometry) for snap in later], 0)

    def test_coarse_sampling(self):
        labels = np.arange(32)
        samples = [replace(make_circle(radius, nodes=32), labels=labels, time=t)
                   for radius, t in ((1.0, 0.0), (0.6, 0.2), (0.2, 0.4))]
        with pytest.raises(MonitorError):
            pointwise_density_rate(samples, 0)

    def test_relative_mismatch_scales(self):
        series = PointwiseRateSeries('rate', 0, np.arange(3.0), np.ones(3),
                                     measured=np.array([1.0, 1.1, 1.0]), predicted=np.ones(3))
        assert series.relative_mismatch == pytest.approx(0.1)
        assert not series.passes(0.05)
        flat = PointwiseRateSeries('rate', 0, np.arange(3.0), np.full(3, 2.0),
                                   measured=np.array([0.0, 0.02, 0.0]), predicted=np.zeros(3))
        assert flat.relative_mismatch == pytest.approx(0.01)
