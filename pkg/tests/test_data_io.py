"""
Run directories, snapshot and series files.
"""

import json
from dataclasses import replace
from enum import Enum
from pathlib import Path

import numpy as np
import pytest

from conftest import make_circle, make_sphere_profile
from functionals.verdicts import FunctionalSeries
from geometry.compute import compute_geometry
from geometry.snapshot import Clock
from utils.data_io import DataIO, RunDirectory, to_jsonable


class Colour(Enum):
    RED = 'red'


class TestJson:

    def test_to_jsonable(self):
        payload = {
            1: np.float64(0.5),
            'ints': np.arange(3),
            'flag': np.bool_(True),
            'inf': float('inf'),
            'nested': (Colour.RED, Path('a/b')),
        }
        assert to_jsonable(payload) == {
            '1': 0.5, 'ints': [0, 1, 2], 'flag': True, 'inf': 'inf', 'nested': ['red', 'a/b']}
        json.dumps(to_jsonable(payload))


class TestRunDirectory:

    def test_files_stay_partial_until_finalize(self, tmp_path):
        run_dir = RunDirectory(tmp_path / 'run')
        run_dir.write_json('report.json', {'matched': True})
        run_dir.write_text('config.normalized.cfg', '[scenario]\nname = circle\n')
        stream = run_dir.open_stream('steps.jsonl')
        stream.write({'step': 1, 'clock': np.float64(0.1)})
        stream.write({'step': 2, 'clock': np.float64(0.2)})

        assert run_dir.pending == ['config.normalized.cfg', 'report.json', 'steps.jsonl']
        assert not (tmp_path / 'run' / 'report.json').exists()
        assert (tmp_path / 'run' / 'report.json.partial').exists()

        artifacts = run_dir.finalize()
        assert sorted(artifacts) == ['config.normalized.cfg', 'report.json', 'steps.jsonl']
        assert not list((tmp_path / 'run').glob('*.partial'))
        lines = (tmp_path / 'run' / 'steps.jsonl').read_text().splitlines()
        assert [json.loads(line)['step'] for line in lines] == [1, 2]
        assert stream.records == 2
        assert stream.closed
        assert run_dir.pending == []

    def test_nested_paths(self, tmp_path):
        run_dir = RunDirectory(tmp_path)
        run_dir.write_text('plots/series.html', '<html></html>')
        artifacts = run_dir.finalize()
        assert Path(artifacts['plots/series.html']).read_text() == '<html></html>'


class TestSnapshotFiles:

    def test_snapshot_round_trip_keeps_labels(self, tmp_path):
        circle = make_circle(1.0, nodes=32, clock=Clock.S)
        labels = np.arange(32)[::-1].copy()
        snapshot = replace(circle, labels=labels, time=0.25)
        run_dir = RunDirectory(tmp_path)
        run_dir.write_snapshot('snapshots/step_000010.csv', snapshot, {'step': 10})
        run_dir.finalize()

        loaded = DataIO.load_snapshot(tmp_path / 'snapshots' / 'step_000010.csv')
        np.testing.assert_array_equal(loaded.nodes, snapshot.nodes)
        np.testing.assert_array_equal(loaded.labels, labels)
        assert loaded.time == 0.25
        assert loaded.clock == Clock.S
        assert loaded.representation.closed
        assert loaded.geometry is None

        sidecar = json.loads((tmp_path / 'snapshots' / 'step_000010.json').read_text())
        assert sidecar['step'] == 10
        assert sidecar['kind'] == 'planar_curve'
        assert sidecar['schema_version'] == 1

    def test_rotational_frame_columns(self, unit_sphere):
        frame = DataIO.snapshot_frame(unit_sphere)
        assert list(frame.columns) == ['label', 'r', 'z', 'mean_curvature', 'normal_part',
                                       'second_fundamental_sq', 'area_element']
        bare = DataIO.snapshot_frame(unit_sphere.with_nodes(unit_sphere.nodes, 0.0))
        assert list(bare.columns) == ['label', 'r', 'z']

    def test_reloaded_sphere_has_same_geometry(self, tmp_path):
        sphere = make_sphere_profile(nodes=33)
        run_dir = RunDirectory(tmp_path)
        run_dir.write_snapshot('sphere.csv', sphere)
        run_dir.finalize()
        loaded = compute_geometry(DataIO.load_snapshot(tmp_path / 'sphere.csv'))
        np.testing.assert_allclose(loaded.geometry.mean_curvature, sphere.geometry.mean_curvature, rtol=1e-12)


class TestSeriesFiles:

    def test_series_round_trip(self, tmp_path):
        series = FunctionalSeries(name='weighted_mass')
        series.append(0.0, 1.0 / 3.0)
        series.append(0.5, 0.25, truncation=10.0, excluded_fraction=1e-14)
        run_dir = RunDirectory(tmp_path)
        run_dir.write_series('series/weighted_mass.csv', series)
        run_dir.finalize()

        loaded = DataIO.load_series(tmp_path / 'series' / 'weighted_mass.csv')
        assert loaded.name == 'weighted_mass'
        assert loaded.values == series.values
        assert loaded.truncations[0] == float('inf')
        assert loaded.excluded_fractions[1] == pytest.approx(1e-14)
