"""
Scenario catalog and admissibility of initial data.
"""

import numpy as np
import pytest

from core.config import GEOMETRY_DEFAULTS
from core.errors import GeometryError
from geometry.compute import compute_geometry
from geometry.representation import RepresentationKind
from scenarios.admissibility import AdmissibilityChecker, Status, admissibility_report, extended_surface
from scenarios.catalog import CATALOG, build_scenario, scenario_parameters

SMALL = {
    'circle': dict(nodes=64),
    'offcenter_circle': dict(nodes=64),
    'sphere': dict(nodes=33),
    'line': dict(nodes=41),
    'plane_graph': dict(nodes=51),
    'hyperboloid': dict(nodes=101, r_max=10.0),
    'eh_graph': dict(nodes=101, r_max=10.0),
    'revolution_sinlog': dict(nodes=101, r_max=10.0),
    'expander_profile': dict(tol=1e-3),
}


class TestCatalog:

    @pytest.mark.parametrize('name', sorted(CATALOG))
    def test_every_entry_builds_a_runnable_bundle(self, name):
        bundle = build_scenario(name, **SMALL[name])
        assert bundle.name == name
        assert bundle.horizon > 0.0
        assert bundle.monitors
        snapshot = compute_geometry(bundle.snapshot)
        bundle.flow.validate(snapshot)
        assert np.all(np.isfinite(snapshot.geometry.mean_curvature))
        assert bundle.params == {**scenario_parameters(name), **SMALL[name]}

    @pytest.mark.parametrize('name', ['circle', 'eh_graph', 'hyperboloid'])
    def test_builders_are_deterministic(self, name):
        first = build_scenario(name, **SMALL[name])
        second = build_scenario(name, **SMALL[name])
        np.testing.assert_array_equal(first.snapshot.nodes, second.snapshot.nodes)

    def test_unknown_names_and_parameters(self):
        with pytest.raises(ValueError):
            build_scenario('torus')
        with pytest.raises(ValueError):
            build_scenario('circle', radius=1.0, spin=2)
        with pytest.raises(ValueError):
            scenario_parameters('torus')

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            build_scenario('circle', radius=-1.0)
        with pytest.raises(ValueError):
            build_scenario('hyperboloid', a=0.0)
        with pytest.raises(ValueError):
            build_scenario('hyperboloid', mu=-2.0, nodes=51)
        with pytest.raises(ValueError):
            build_scenario('hyperboloid', parametrization='polar', nodes=51)
        with pytest.raises(ValueError):
            build_scenario('plane_graph', nodes=3)

    def test_bundle_unpacks(self):
        snapshot, flow, monitors = build_scenario('circle', nodes=32)
        assert snapshot.node_count == 32
        assert flow.variant.value == 'drifting_mcf'
        assert 'density_rate' in monitors

    def test_circle_metadata(self):
        bundle = build_scenario('circle', radius=2.0, nodes=32, center_x=1.0)
        assert bundle.metadata['singular_time'] == pytest.approx(2.0)
        assert bundle.metadata['center'] == [1.0, 0.0]
        np.testing.assert_allclose(np.mean(bundle.snapshot.nodes, axis=0), [1.0, 0.0], atol=1e-12)

    def test_normalized_variant_switches_clock(self):
        bundle = build_scenario('line', nodes=21, variant='normalized_drifting_mcf')
        assert bundle.snapshot.clock.value == 's'
        assert 'normalized_density_rate' in bundle.monitors

    def test_hyperboloid_rescaling(self):
        bundle = build_scenario('hyperboloid', mu=2.0, nodes=51)
        assert bundle.metadata['a_rescaled'] == pytest.approx(1.0 / np.sqrt(2.0))
        assert bundle.snapshot.nodes[0, 1] == pytest.approx(1.0 / np.sqrt(2.0))

    def test_hyperboloid_mu_search(self):
        auto = build_scenario('hyperboloid', nodes=201)
        assert auto.metadata['mu'] in (1.0, 2.0)
        # -<x0,nu> / H is smallest at the apex, where it equals a^2 / 2
        lowest = build_scenario('hyperboloid', mu='nondecreasing', nodes=201)
        assert lowest.metadata['mu'] == pytest.approx(0.5, rel=1e-2)

    def test_hyperboloid_sheet(self):
        bundle = build_scenario('hyperboloid', mu=1.0, nodes=51, parametrization='sheet', analytic=True)
        rep = bundle.snapshot.representation
        assert rep.kind == RepresentationKind.REVOLUTION_PROFILE
        assert not rep.start_on_axis
        assert bundle.flow.boundary.value == 'fixed_dirichlet'
        assert bundle.metadata['sheet_parameter'][0] == pytest.approx(1.001)

    def test_hyperboloid_sheet_start_is_configurable(self, monkeypatch):
        monkeypatch.setitem(GEOMETRY_DEFAULTS, 'hyperboloid_epsilon', 0.05)
        bundle = build_scenario('hyperboloid', mu=1.0, nodes=51, parametrization='sheet')
        assert bundle.metadata['sheet_parameter'][0] == pytest.approx(1.05)

    def test_capped_profiles_start_flat(self):
        for name in ('eh_graph', 'revolution_sinlog'):
            bundle = build_scenario(name, **SMALL[name])
            assert bundle.profile.first(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-12)
            assert 'cap' in bundle.metadata

    def test_graph_with_repeated_radius_is_rejected(self):
        bundle = build_scenario('plane_graph', nodes=11)
        nodes = bundle.snapshot.nodes.copy()
        nodes[3, 0] = nodes[4, 0]
        with pytest.raises(GeometryError):
            compute_geometry(bundle.snapshot.with_nodes(nodes, 0.0))


class TestAdmissibility:

    def test_circle(self):
        report = admissibility_report(build_scenario('circle', nodes=64).snapshot)
        assert report['growth_condition'].status == Status.HOLDS
        assert report['growth_condition'].note == 'compact'
        assert report['initial_mass_finite'].status == Status.HOLDS
        assert report['mean_convex'].status == Status.HOLDS
        assert report['convergent_mu'].value == 1.0
        assert report['nondecreasing_mu'].status == Status.FAILS
        # A closed curve is not a graph over w
        assert report['linear_growth'].status == Status.FAILS
        assert report['height_shift'].status == Status.INCONCLUSIVE
        assert 'volume_growth' not in report.checks

    def test_plane(self):
        report = admissibility_report(build_scenario('plane_graph', nodes=101).snapshot)
        assert report['growth_condition'].status == Status.HOLDS
        assert report['mean_convex'].status == Status.FAILS
        assert report['convergent_mu'].value == 1.0
        assert report['nondecreasing_mu'].value == float('inf')
        assert report['height_shift'].value == 0.0
        assert report['volume_growth'].value == pytest.approx(2.0, abs=0.1)

    def test_hyperboloid(self):
        bundle = build_scenario('hyperboloid', mu=1.0, nodes=201)
        extended = extended_surface(bundle.profile, 2)
        report = admissibility_report(bundle.snapshot, extended=extended)
        assert report['growth_condition'].status == Status.HOLDS
        assert report['growth_condition'].note.endswith('(extended surface)')
        assert report['mean_convex'].status == Status.HOLDS
        assert report['nondecreasing_mu'].status == Status.HOLDS
        assert report['linear_growth'].status == Status.HOLDS
        assert set(report.to_dict()['mean_convex']) == {'status', 'value', 'witnesses', 'note'}

    def test_oscillating_graph_violates_growth_condition(self):
        bundle = build_scenario('eh_graph', **SMALL['eh_graph'])
        check = AdmissibilityChecker.growth_condition(extended_surface(bundle.profile, 2))
        assert check.status == Status.FAILS
        assert len(check.witnesses) >= 2

    def test_height_shift_clears_positive_normal_part(self):
        bundle = build_scenario('plane_graph', nodes=51, height=-2.0)
        snapshot = compute_geometry(bundle.snapshot)
        # x0 = (r, -2), nu = (0, -1): <x0, nu> = 2 and V = 1
        check = AdmissibilityChecker.height_shift(snapshot)
        assert check.status == Status.HOLDS
        assert check.value == pytest.approx(2.0)
