"""
Sweeps over configuration files with bounded parallelism.
"""

import concurrent.futures
import glob
import logging
from collections import defaultdict
from pathlib import Path

from typing import Any, Dict, Iterable, List, Sequence, Union

from core.config import CONFIG_DIR, default_output_root
from core.errors import ConfigError, LabError, MonitorError
from core.scenario_config import load_config
from functionals.verdicts import observed_order
from sim.report import SweepReport
from sim.runner import run
from utils.data_io import RunDirectory

logger = logging.getLogger(__name__)

SWEEP_REPORT = 'sweep.json'
SWEEP_TABLE = 'sweep_table.txt'


def expand_configs(pattern: str) -> List[Path]:
    """
    Configuration files matching a glob, looked up in the shipped configs as well.

    Raises:
        ConfigError: nothing matches
    """
    matches = sorted(glob.glob(pattern))
    if not matches and not Path(pattern).is_absolute():
        matches = sorted(glob.glob(str(CONFIG_DIR / pattern)))
    if not matches:
        raise ConfigError(f"No configuration matches '{pattern}'")
    return [Path(match) for match in matches]


def _run_child(config_path: str, output_dir: str, overrides: Sequence[str]) -> Dict[str, Any]:
    """Worker entry point; failures are returned, not raised."""
    result: Dict[str, Any] = {'config': config_path, 'error': None, 'report': None, 'refinement': {}}
    try:
        config = load_config(config_path).apply_overrides(overrides)
        result['refinement'] = dict(config.section('refinement'))
        result['report'] = run(config_path, output_dir, overrides).to_dict()
    except (LabError, ValueError, OSError) as exc:
        logger.error("%s failed: %s", config_path, exc)
        result['error'] = f"{type(exc).__name__}: {exc}"
    return result


def _refinement_orders(runs: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    groups: Dict[str, List[Dict[str, Any]]] = defaultdict(list)
    for entry in runs:
        if entry['report'] is not None and 'group' in entry['refinement']:
            groups[entry['refinement']['group']].append(entry)

    orders: Dict[str, Dict[str, Any]] = {}
    for group, members in sorted(groups.items()):
        members.sort(key=lambda entry: entry['refinement'].get('level', 0))
        refinement = members[0]['refinement']
        quantity = refinement.get('quantity', 'radius_error')
        spacings = [entry['report']['initial_spacing'] for entry in members]
        errors = [entry['report']['verdicts'].get(quantity, {}).get('value') for entry in members]
        fit: Dict[str, Any] = {'quantity': quantity, 'spacings': spacings, 'errors': errors,
                               'min_order': refinement.get('min_order'), 'order': float('nan')}
        try:
            fit['order'] = observed_order(spacings, [float(e) if e is not None else 0.0 for e in errors])
        except MonitorError as exc:
            fit['note'] = str(exc)
        minimum = fit['min_order']
        fit['matched'] = minimum is None or fit['order'] >= minimum
        logger.info("Refinement %s: observed order %.3f over %d levels", group, fit['order'], len(members))
        orders[group] = fit
    return orders


def sweep(pattern: str, jobs: int = 1, output_dir: Union[str, Path, None] = None,
          overrides: Iterable[str] = ()) -> SweepReport:
    """
    Run every configuration matching a glob and aggregate the reports.

    Each child owns its own run directory; the aggregate JSON and table are
    written by this process only.

    Args:
        pattern: Glob of configuration files
        jobs: Worker processes; 1 runs in-process
        output_dir: Output root shared by the children
        overrides: `section.key=value` overrides applied to every child

    Raises:
        ConfigError: empty glob
    """
    paths = [str(path) for path in expand_configs(pattern)]
    output = Path(output_dir) if output_dir is not None else default_output_root()
    overrides = list(overrides)
    logger.info("Sweeping %d configurations with %d worker(s)", len(paths), jobs)

    if jobs <= 1:
        runs = [_run_child(path, str(output), overrides) for path in paths]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_child, path, str(output), overrides) for path in paths]
            runs = [future.result() for future in futures]

    report = SweepReport(runs=runs, orders=_refinement_orders(runs))
    directory = RunDirectory(output)
    directory.write_json(SWEEP_REPORT, report.to_dict())
    directory.write_text(SWEEP_TABLE, report.render() + '\n')
    directory.finalize()
    return report
