"""
Interactive run figures using Plotly.
"""

import numpy as np
import plotly.graph_objects as go
from plotly.subplots import make_subplots
from typing import Dict, List, Sequence, Tuple

from core.config import COLORS, PLOT_CONFIG
from core.constants import MONITOR_EQUATIONS
from functionals.verdicts import FunctionalSeries, Verdict
from geometry.representation import RepresentationKind
from geometry.snapshot import HypersurfaceSnapshot

VERDICT_COLORS = {
    Verdict.PASS: COLORS['accent_green'],
    Verdict.FAIL: COLORS['accent_red'],
    Verdict.INCONCLUSIVE: COLORS['accent_yellow'],
}


class FlowPlotter:
    """Create interactive Plotly figures for a finished run."""

    @staticmethod
    def _style(fig: go.Figure, title: str, height: int) -> go.Figure:
        fig.update_layout(
            template=PLOT_CONFIG['template'],
            paper_bgcolor=COLORS['bg_dark'],
            plot_bgcolor=COLORS['bg_light'],
            font=dict(color=COLORS['text_white'], size=12),
            title=dict(text=title, font=dict(size=16, color=COLORS['accent_blue'])),
            showlegend=True,
            height=height,
            margin=dict(l=60, r=40, t=80, b=60),
            dragmode='zoom',
        )
        fig.update_xaxes(gridcolor=COLORS['grid'], showgrid=True)
        fig.update_yaxes(gridcolor=COLORS['grid'], showgrid=True)
        return fig

    @staticmethod
    def pick_snapshots(samples: Sequence[HypersurfaceSnapshot], limit: int) -> List[HypersurfaceSnapshot]:
        """Evenly spaced samples, always including the first and last."""
        if len(samples) <= limit:
            return list(samples)
        indices = np.unique(np.linspace(0, len(samples) - 1, limit).round().astype(int))
        return [samples[i] for i in indices]

    @staticmethod
    def axis_titles(kind: RepresentationKind) -> Tuple[str, str]:
        if kind == RepresentationKind.PLANAR_CURVE:
            return 'x', 'y'
        return 'r', 'z'

    @staticmethod
    def profile_figure(samples: Sequence[HypersurfaceSnapshot], title: str) -> go.Figure:
        """
        Overlay of snapshot profiles.

        The first sample is drawn in the initial-data colour, later ones fade
        from dim to full in the evolving colour.

        Args:
            samples: Sampled snapshots in clock order
            title: Figure title

        Returns:
            Plotly Figure object
        """
        fig = go.Figure()
        shown = FlowPlotter.pick_snapshots(samples, PLOT_CONFIG['max_snapshot_traces'])
        for index, snap in enumerate(shown):
            first = index == 0
            nodes = snap.nodes
            if snap.kind == RepresentationKind.PLANAR_CURVE:
                nodes = np.vstack([nodes, nodes[:1]])
            fig.add_trace(go.Scattergl(
                x=nodes[:, 0], y=nodes[:, 1],
                mode='lines',
                name=f"{snap.clock.value} = {snap.time:.4g}",
                line=dict(color=COLORS['accent_green'] if first else COLORS['accent_blue'],
                          width=PLOT_CONFIG['line_width']),
                opacity=1.0 if first else 0.35 + 0.65 * index / max(len(shown) - 1, 1),
            ))

        x_title, y_title = FlowPlotter.axis_titles(samples[0].kind)
        fig.update_xaxes(title_text=x_title)
        fig.update_yaxes(title_text=y_title)
        if samples[0].kind == RepresentationKind.PLANAR_CURVE:
            fig.update_yaxes(scaleanchor='x', scaleratio=1)
        return FlowPlotter._style(fig, title, PLOT_CONFIG['height'])

    @staticmethod
    def series_figure(series: Dict[str, Tuple[FunctionalSeries, Verdict]], title: str) -> go.Figure:
        """
        One panel per monitored series, coloured by the monitor verdict.

        Args:
            series: `monitor/key` -> (series, verdict of its monitor)
            title: Figure title

        Returns:
            Plotly Figure object
        """
        names = sorted(series)
        subtitles = []
        for name in names:
            monitor = name.split('/', 1)[0]
            label = MONITOR_EQUATIONS.get(monitor, (monitor,))[0]
            subtitles.append(f"{label} ({name})")

        fig = make_subplots(rows=max(len(names), 1), cols=1, subplot_titles=subtitles or None,
                            vertical_spacing=0.25 / max(len(names), 1))
        for row, name in enumerate(names, start=1):
            values, verdict = series[name]
            fig.add_trace(
                go.Scattergl(
                    x=values.clock_array, y=values.value_array,
                    mode='lines+markers',
                    name=name,
                    marker=dict(size=4),
                    line=dict(color=VERDICT_COLORS[verdict], width=PLOT_CONFIG['line_width']),
                    hovertemplate='clock: %{x:.5g}<br>value: %{y:.6g}<extra></extra>',
                ),
                row=row, col=1,
            )
        return FlowPlotter._style(fig, title, max(PLOT_CONFIG['height'], 260 * len(names)))

    @staticmethod
    def run_figures(samples: Sequence[HypersurfaceSnapshot], report) -> Dict[str, go.Figure]:
        """
        Figures written next to a run report, keyed by file name.

        Args:
            samples: Sampled snapshots of the run
            report: RunReport with evaluated monitors

        Returns:
            Dictionary of file name -> Plotly Figure
        """
        figures: Dict[str, go.Figure] = {}
        if samples:
            figures['profiles.html'] = FlowPlotter.profile_figure(
                samples, f"{report.label}: {report.flow.get('equation', report.flow.get('variant', ''))}")

        series = {
            f"{name}/{key}": (values, entry.outcome.verdict)
            for name, entry in report.verdicts.items()
            for key, values in entry.outcome.series.items() if len(values) > 0
        }
        if series:
            figures['series.html'] = FlowPlotter.series_figure(series, f"{report.label}: monitored series")
        return figures
