"""
Run output I/O: snapshot CSV with JSON sidecar, series CSV, JSON and
JSON-lines, all written as `.partial` files until the run finalizes.
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from typing import Any, Dict, List, Optional, TextIO

from core.config import OUTPUT_CONFIG
from functionals.verdicts import SERIES_COLUMNS, FunctionalSeries
from geometry.representation import Representation, RepresentationKind
from geometry.snapshot import Clock, HypersurfaceSnapshot

logger = logging.getLogger(__name__)

SNAPSHOT_GEOMETRY_COLUMNS = ['mean_curvature', 'normal_part', 'second_fundamental_sq', 'area_element']


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; numpy scalars and arrays unwrapped, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def _coordinate_names(kind: RepresentationKind) -> List[str]:
    return ['x', 'y'] if kind == RepresentationKind.PLANAR_CURVE else ['r', 'z']


class DataIO:
    """Snapshot and series (de)serialization."""

    @staticmethod
    def snapshot_frame(snapshot: HypersurfaceSnapshot) -> pd.DataFrame:
        """
        One row per node: label, position, then H, <x,nu>, |A|^2 and the
        dmu weight when geometry is cached.
        """
        first, second = _coordinate_names(snapshot.kind)
        labels = snapshot.labels if snapshot.labels is not None else np.arange(snapshot.node_count)
        columns: Dict[str, np.ndarray] = {
            'label': np.asarray(labels, dtype=int),
            first: snapshot.nodes[:, 0],
            second: snapshot.nodes[:, 1],
        }
        if snapshot.geometry is not None:
            geo = snapshot.geometry
            for name in SNAPSHOT_GEOMETRY_COLUMNS:
                columns[name] = getattr(geo, name)
        return pd.DataFrame(columns)

    @staticmethod
    def snapshot_sidecar(snapshot: HypersurfaceSnapshot, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        rep = snapshot.representation
        sidecar = {
            'schema_version': OUTPUT_CONFIG['schema_version'],
            'kind': rep.kind.value,
            'dimension': rep.dimension,
            'time': snapshot.time,
            'clock': snapshot.clock.value,
            'closed': rep.closed,
            'start_on_axis': rep.start_on_axis,
            'end_on_axis': rep.end_on_axis,
            'node_count': snapshot.node_count,
        }
        if snapshot.geometry is not None:
            sidecar['spacing'] = snapshot.geometry.spacing
        if extra:
            sidecar.update(extra)
        return to_jsonable(sidecar)

    @staticmethod
    def load_snapshot(csv_path) -> HypersurfaceSnapshot:
        """
        Read a snapshot CSV and its sidecar back; geometry is recomputed on demand.

        Args:
            csv_path: Path to the snapshot CSV, sidecar next to it with .json

        Returns:
            HypersurfaceSnapshot without cached geometry
        """
        csv_path = Path(csv_path)
        with open(csv_path.with_suffix('.json'), 'r', encoding='utf-8') as f:
            sidecar = json.load(f)
        kind = RepresentationKind(sidecar['kind'])
        frame = pd.read_csv(csv_path)
        first, second = _coordinate_names(kind)
        rep = Representation(kind, dimension=sidecar['dimension'], closed=sidecar['closed'],
                             start_on_axis=sidecar['start_on_axis'], end_on_axis=sidecar['end_on_axis'])
        return HypersurfaceSnapshot(
            rep,
            frame[[first, second]].to_numpy(dtype=float),
            time=float(sidecar['time']),
            clock=Clock(sidecar['clock']),
            labels=frame['label'].to_numpy(dtype=int),
        )

    @staticmethod
    def series_frame(series: FunctionalSeries) -> pd.DataFrame:
        return series.to_frame()[SERIES_COLUMNS]

    @staticmethod
    def load_series(csv_path, name: Optional[str] = None) -> FunctionalSeries:
        csv_path = Path(csv_path)
        return FunctionalSeries.from_frame(name or csv_path.stem, pd.read_csv(csv_path))


class JsonLinesWriter:
    """Append-only JSON-lines stream."""

    def __init__(self, handle: TextIO):
        self._handle = handle
        self.records = 0

    def write(self, record: Dict[str, Any]) -> None:
        self._handle.write(json.dumps(to_jsonable(record), sort_keys=True) + '\n')
        self.records += 1

    def close(self) -> None:
        self._handle.close()

    @property
    def closed(self) -> bool:
        return self._handle.closed


class RunDirectory:
    """
    Output directory of one run.

    Files are written under `<name>.partial` and only renamed to their
    final names by finalize(), so an interrupted run leaves nothing that
    looks complete.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._pending: Dict[str, Path] = {}
        self._streams: List[JsonLinesWriter] = []

    def _partial(self, relative: str) -> Path:
        final = self.root / relative
        final.parent.mkdir(parents=True, exist_ok=True)
        partial = final.with_name(final.name + OUTPUT_CONFIG['partial_suffix'])
        self._pending[relative] = partial
        return partial

    def write_text(self, relative: str, text: str) -> None:
        self._partial(relative).write_text(text, encoding='utf-8')

    def write_json(self, relative: str, payload: Dict[str, Any]) -> None:
        self.write_text(relative, json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + '\n')

    def write_frame(self, relative: str, frame: pd.DataFrame) -> None:
        frame.to_csv(self._partial(relative), index=False, float_format=OUTPUT_CONFIG['float_format'])

    def write_snapshot(self, relative: str, snapshot: HypersurfaceSnapshot,
                       extra: Optional[Dict[str, Any]] = None) -> None:
        """Snapshot CSV at `relative` plus its JSON sidecar."""
        self.write_frame(relative, DataIO.snapshot_frame(snapshot))
        self.write_json(str(Path(relative).with_suffix('.json')), DataIO.snapshot_sidecar(snapshot, extra))

    def write_series(self, relative: str, series: FunctionalSeries) -> None:
        self.write_frame(relative, DataIO.series_frame(series))

    def open_stream(self, relative: str) -> JsonLinesWriter:
        stream = JsonLinesWriter(open(self._partial(relative), 'w', encoding='utf-8'))
        self._streams.append(stream)
        return stream

    @property
    def pending(self) -> List[str]:
        return sorted(self._pending)

    def finalize(self) -> Dict[str, str]:
        """Close streams and rename every partial file; returns final paths by relative name."""
        for stream in self._streams:
            stream.close()
        self._streams.clear()
        artifacts: Dict[str, str] = {}
        for relative in sorted(self._pending):
            final = self.root / relative
            os.replace(self._pending[relative], final)
            artifacts[relative] = str(final)
        logger.debug("Finalized %d files in %s", len(artifacts), self.root)
        self._pending.clear()
        return artifacts
