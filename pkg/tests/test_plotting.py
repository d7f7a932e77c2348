"""
Plotly figures of profiles and monitored series.
"""

from conftest import make_circle
from functionals.verdicts import FunctionalSeries, Verdict
from geometry.representation import RepresentationKind
from plotting.flow_plotter import FlowPlotter


class TestFlowPlotter:

    def test_pick_snapshots_keeps_ends(self):
        samples = list(range(100))
        picked = FlowPlotter.pick_snapshots(samples, 5)
        assert picked[0] == 0 and picked[-1] == 99
        assert len(picked) == 5
        assert FlowPlotter.pick_snapshots(samples[:3], 5) == [0, 1, 2]

    def test_closed_curves_are_drawn_closed(self):
        circle = make_circle(1.0, nodes=16)
        fig = FlowPlotter.profile_figure([circle, circle.with_nodes(0.5 * circle.nodes, 0.1)], 'circle')
        assert len(fig.data) == 2
        assert len(fig.data[0].x) == 17
        assert fig.layout.yaxis.scaleanchor == 'x'

    def test_graph_axes(self, flat_graph):
        assert FlowPlotter.axis_titles(RepresentationKind.RADIAL_GRAPH) == ('r', 'z')
        fig = FlowPlotter.profile_figure([flat_graph], 'plane')
        assert fig.layout.xaxis.title.text == 'r'

    def test_series_panels(self):
        mass = FunctionalSeries(name='weighted_mass')
        mass.append(0.0, 1.0)
        mass.append(0.5, 0.9)
        fig = FlowPlotter.series_figure({'weighted_mass/value': (mass, Verdict.PASS),
                                         'sign/residual_min': (mass, Verdict.FAIL)}, 'series')
        assert len(fig.data) == 2
        titles = [annotation.text for annotation in fig.layout.annotations]
        assert 'Weighted mass (weighted_mass/value)' in titles
