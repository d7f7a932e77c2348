"""
Run and sweep reports.
"""

import numpy as np
import pandas as pd
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from core.config import OUTPUT_CONFIG
from functionals.verdicts import Verdict
from sim.monitors import MonitorOutcome
from utils.data_io import to_jsonable


@dataclass
class ExpectedVerdict:
    """Expected against observed verdict of one monitor."""
    expected: Verdict
    outcome: MonitorOutcome

    @property
    def matched(self) -> bool:
        return self.outcome.verdict == self.expected

    def to_dict(self) -> Dict[str, Any]:
        return {**self.outcome.to_dict(), 'expected': self.expected.value, 'matched': self.matched}


@dataclass
class RunReport:
    """Outcome of one scenario run."""
    scenario: str
    label: str
    params: Dict[str, Any]
    config_text: str
    flow: Dict[str, Any]
    horizon: float
    verdicts: Dict[str, ExpectedVerdict] = field(default_factory=dict)
    expected_outcome: Optional[str] = None
    expected_termination: Optional[str] = None
    termination: Optional[Dict[str, Any]] = None
    steps: int = 0
    rejected_steps: int = 0
    samples: int = 0
    final_clock: float = 0.0
    initial_spacing: float = float('nan')
    wall_clock: float = 0.0
    admissibility: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)

    @property
    def termination_signal(self) -> Optional[str]:
        return None if self.termination is None else self.termination['signal']

    @property
    def mismatches(self) -> List[str]:
        """Human-readable list of everything that differs from the expectations."""
        problems = [
            f"{name}: expected {entry.expected.value}, got {entry.outcome.verdict.value}"
            for name, entry in self.verdicts.items() if not entry.matched
        ]
        if self.termination_signal != self.expected_termination:
            problems.append(f"termination: expected {self.expected_termination or 'none'}, "
                            f"got {self.termination_signal or 'none'}")
        return problems

    @property
    def matched(self) -> bool:
        return not self.mismatches

    @property
    def truncation_flags(self) -> List[str]:
        return sorted(
            f"{name}.{key}"
            for name, entry in self.verdicts.items()
            for key, series in entry.outcome.series.items() if series.flagged
        )

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'schema_version': OUTPUT_CONFIG['schema_version'],
            'scenario': {'name': self.scenario, 'label': self.label, 'params': self.params,
                         'metadata': self.metadata},
            'config': self.config_text,
            'flow': self.flow,
            'horizon': self.horizon,
            'expected': {'outcome': self.expected_outcome, 'termination': self.expected_termination},
            'termination': self.termination,
            'verdicts': {name: entry.to_dict() for name, entry in self.verdicts.items()},
            'matched': self.matched,
            'mismatches': self.mismatches,
            'truncation_flags': self.truncation_flags,
            'steps': self.steps,
            'rejected_steps': self.rejected_steps,
            'samples': self.samples,
            'final_clock': self.final_clock,
            'initial_spacing': self.initial_spacing,
            'wall_clock': self.wall_clock,
            'admissibility': self.admissibility,
            'artifacts': self.artifacts,
        })

    def summary(self) -> str:
        lines = [f"{self.label}: {'OK' if self.matched else 'UNEXPECTED'} "
                 f"({self.steps} steps to clock {self.final_clock:.6g}, {self.wall_clock:.2f} s)"]
        if self.termination is not None:
            lines.append(f"  termination {self.termination['signal']} at clock {self.termination['clock']:.6g}")
        for name, entry in self.verdicts.items():
            value = entry.outcome.value
            shown = 'n/a' if value is None else f"{value:.4g}"
            mark = '' if entry.matched else f"  (expected {entry.expected.value})"
            lines.append(f"  {name:<24} {entry.outcome.verdict.value:<13} {shown}{mark}")
        return '\n'.join(lines)


def verdict_table(reports: List[Dict[str, Any]]) -> pd.DataFrame:
    """One row per (run, monitor) from report dictionaries."""
    rows = []
    for report in reports:
        label = report['scenario']['label']
        for name, entry in report['verdicts'].items():
            rows.append({
                'run': label,
                'monitor': name,
                'verdict': entry['verdict'],
                'expected': entry['expected'],
                'matched': entry['matched'],
                'value': entry['value'] if isinstance(entry['value'], (int, float)) else np.nan,
            })
    return pd.DataFrame(rows, columns=['run', 'monitor', 'verdict', 'expected', 'matched', 'value'])


@dataclass
class SweepReport:
    """Aggregate of a sweep over configuration files."""
    runs: List[Dict[str, Any]] = field(default_factory=list)          # Child results in config order
    orders: Dict[str, Dict[str, Any]] = field(default_factory=dict)   # Refinement group -> fit

    @property
    def failures(self) -> List[str]:
        problems = []
        for run in self.runs:
            if run['error'] is not None:
                problems.append(f"{run['config']}: {run['error']}")
            elif not run['report']['matched']:
                problems.append(f"{run['config']}: {'; '.join(run['report']['mismatches'])}")
        for group, fit in self.orders.items():
            if not fit['matched']:
                problems.append(f"refinement {group}: observed order {fit['order']} below {fit['min_order']}")
        return problems

    @property
    def matched(self) -> bool:
        return not self.failures

    def table(self) -> pd.DataFrame:
        return verdict_table([run['report'] for run in self.runs if run['report'] is not None])

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'schema_version': OUTPUT_CONFIG['schema_version'],
            'runs': self.runs,
            'orders': self.orders,
            'matched': self.matched,
            'failures': self.failures,
        })

    def render(self) -> str:
        """Human-readable verdict table plus refinement fits and failures."""
        table = self.table()
        lines = [table.to_string(index=False) if not table.empty else '(no completed runs)']
        for group, fit in self.orders.items():
            lines.append(f"refinement {group}: observed order {fit['order']:.3f} "
                         f"from {len(fit['spacings'])} levels ({fit['quantity']})")
        passed = sum(1 for run in self.runs if run['error'] is None and run['report']['matched'])
        lines.append(f"{passed}/{len(self.runs)} runs as expected")
        lines.extend(f"FAILED {problem}" for problem in self.failures)
        return '\n'.join(lines)
