"""
Single scenario runs driven by configuration files.
"""

import logging
import time
from dataclasses import replace
from pathlib import Path

from typing import Any, Dict, Iterable, List, Optional, Union

from core.config import OUTPUT_CONFIG, default_output_root
from core.errors import ConfigError, FlowTermination, LabError
from core.scenario_config import ScenarioConfig, load_config
from flow.engine import advance
from flow.flow_spec import BoundaryKind, FlowSpec, FlowVariant, Gauge, parse_enum
from functionals.verdicts import Verdict
from geometry.snapshot import HypersurfaceSnapshot
from plotting.flow_plotter import FlowPlotter
from scenarios.admissibility import admissibility_report, extended_surface
from scenarios.catalog import ScenarioBundle, build_scenario
from sim.monitors import MONITORS, MonitorContext, evaluate_monitor, monitor_parameters
from sim.report import ExpectedVerdict, RunReport
from utils.data_io import RunDirectory

logger = logging.getLogger(__name__)

RUN_DEFAULTS = {
    'sample_every': 10,       # Accepted steps between monitor samples
    'snapshot_every': 50,     # Samples between snapshot dumps
    'admissibility': True,
}

# Monitors whose default expectation flips for non-convergent scenarios
NON_CONVERGENT_MONITORS = ('deficit_vanishing',)

FLOW_ENUMS = {'variant': FlowVariant, 'gauge': Gauge, 'boundary': BoundaryKind}


def _flow_spec(bundle: ScenarioBundle, config: ScenarioConfig, horizon: float) -> FlowSpec:
    typed: Dict[str, Any] = {}
    for key, value in config.section('flow').items():
        try:
            typed[key] = parse_enum(FLOW_ENUMS[key], value) if key in FLOW_ENUMS else value
        except ValueError as exc:
            raise ConfigError(str(exc), config.path, field=f"flow.{key}")
    return replace(bundle.flow, max_time=horizon, **typed)


def _scenario(config: ScenarioConfig) -> ScenarioBundle:
    try:
        return build_scenario(config.name, **config.scenario_params)
    except ValueError as exc:
        raise ConfigError(str(exc), config.path, field='scenario')


def _monitor_plan(bundle: ScenarioBundle, config: ScenarioConfig) -> List[str]:
    monitors = config.monitors or list(bundle.monitors)
    for name in monitors:
        if name not in MONITORS:
            raise ConfigError(f"Unknown monitor '{name}'", config.path, field='monitors.enabled')
    for name, params in config.monitor_params.items():
        unknown = sorted(set(params) - set(monitor_parameters(name)))
        if unknown:
            raise ConfigError(f"Unknown parameters {', '.join(unknown)}", config.path, field=f"monitor.{name}")
    return monitors


def _expected_verdict(name: str, config: ScenarioConfig) -> Verdict:
    if name in config.verdicts:
        return Verdict(config.verdicts[name])
    if config.section('expect').get('outcome') == 'non_convergent' and name in NON_CONVERGENT_MONITORS:
        return Verdict.FAIL
    return Verdict.PASS


def _expected_termination(config: ScenarioConfig) -> Optional[str]:
    expect = config.section('expect')
    if 'termination' in expect:
        value = expect['termination']
        return None if value.lower() == 'none' else value
    if expect.get('outcome') == 'singular':
        return 'FiniteTimeSingularity'
    return None


def _admissibility(bundle: ScenarioBundle) -> Dict[str, Any]:
    try:
        extended = extended_surface(bundle.profile, bundle.snapshot.dimension) if bundle.profile is not None else None
        return admissibility_report(bundle.snapshot, extended=extended).to_dict()
    except (LabError, ValueError) as exc:
        logger.warning("Admissibility report skipped: %s", exc)
        return {'error': str(exc)}


def _step_record(state, sampled: bool) -> Dict[str, Any]:
    diag = state.diagnostics
    return {
        'step': state.step,
        'clock': state.clock,
        'dt': diag.last_step,
        'max_curvature_sq': diag.max_curvature_sq,
        'min_edge': diag.min_edge,
        'max_slope': diag.max_slope,
        'rejected_steps': state.rejected_steps,
        'sampled': sampled,
    }


def run_config(config: ScenarioConfig, output_dir: Union[str, Path, None] = None) -> RunReport:
    """
    Execute a parsed configuration to its horizon or a typed termination.

    Args:
        config: Parsed scenario configuration
        output_dir: Output root; the run writes into <output_dir>/<label>

    Returns:
        RunReport with verdicts compared against the expectations

    Raises:
        ConfigError: invalid scenario, flow or monitor settings
        LabError: numerical failure other than a typed termination
    """
    started = time.perf_counter()
    bundle = _scenario(config)
    run = {**RUN_DEFAULTS, **config.section('run')}
    horizon = float(run.get('horizon', bundle.horizon))
    spec = _flow_spec(bundle, config, horizon)
    snapshot = bundle.snapshot
    if snapshot.clock != spec.clock:
        # t = 0 and s = 0 describe the same initial surface
        snapshot = replace(snapshot, clock=spec.clock)
    try:
        spec.validate(snapshot)
    except ValueError as exc:
        raise ConfigError(str(exc), config.path, field='flow')
    monitors = _monitor_plan(bundle, config)

    output = Path(output_dir) if output_dir is not None else default_output_root()
    directory = RunDirectory(output / config.label)
    steps_log = directory.open_stream(OUTPUT_CONFIG['log_name'])
    write_snapshots = config.section('output').get('snapshots', True)
    sample_every = max(1, int(run['sample_every']))
    snapshot_every = max(1, int(run['snapshot_every']))

    logger.info("Running %s (%s, %s gauge) to %s = %g", config.label, spec.variant.value,
                spec.gauge.value, spec.clock.value, horizon)
    samples: List[HypersurfaceSnapshot] = []
    termination: Optional[FlowTermination] = None
    state = None
    last_sampled = -1

    def take_sample(current) -> None:
        nonlocal last_sampled
        samples.append(current.snapshot)
        last_sampled = current.step
        if write_snapshots and (len(samples) - 1) % snapshot_every == 0:
            directory.write_snapshot(f"{OUTPUT_CONFIG['snapshot_dir']}/snapshot_{len(samples) - 1:05d}.csv",
                                     current.snapshot, {'step': current.step})

    try:
        for state in advance(snapshot, spec, horizon):
            sampled = state.step % sample_every == 0
            if sampled:
                take_sample(state)
            steps_log.write(_step_record(state, sampled))
    except FlowTermination as exc:
        termination = exc
        logger.info("%s", exc)
    finally:
        steps_log.close()
    if state is not None and last_sampled != state.step:
        take_sample(state)
        if write_snapshots and (len(samples) - 1) % snapshot_every != 0:
            directory.write_snapshot(f"{OUTPUT_CONFIG['snapshot_dir']}/snapshot_{len(samples) - 1:05d}.csv",
                                     state.snapshot, {'step': state.step, 'final': True})

    context = MonitorContext(bundle=bundle, spec=spec, horizon=horizon, termination=termination)
    report = RunReport(
        scenario=bundle.name,
        label=config.label,
        params=bundle.params,
        config_text=config.normalized_text(),
        flow=spec.describe(),
        horizon=horizon,
        expected_outcome=config.section('expect').get('outcome'),
        expected_termination=_expected_termination(config),
        steps=state.step if state is not None else 0,
        rejected_steps=state.rejected_steps if state is not None else 0,
        samples=len(samples),
        final_clock=state.clock if state is not None else snapshot.time,
        initial_spacing=samples[0].require_geometry().spacing,
        metadata=bundle.metadata,
    )
    if termination is not None:
        report.termination = {'signal': termination.signal, 'clock': termination.clock,
                              'message': str(termination), 'diagnostics': termination.diagnostics}

    for name in monitors:
        try:
            outcome = evaluate_monitor(name, samples, context, config.monitor_params.get(name))
        except ValueError as exc:
            raise ConfigError(str(exc), config.path, field=f"monitor.{name}")
        report.verdicts[name] = ExpectedVerdict(_expected_verdict(name, config), outcome)
        for key, series in outcome.series.items():
            directory.write_series(f"{OUTPUT_CONFIG['series_dir']}/{name}__{key}.csv", series)

    if run['admissibility']:
        report.admissibility = _admissibility(bundle)

    if config.section('output').get('plots', False):
        for relative, figure in FlowPlotter.run_figures(samples, report).items():
            directory.write_text(f"{OUTPUT_CONFIG['plot_dir']}/{relative}", figure.to_html(include_plotlyjs='cdn'))

    directory.write_text(OUTPUT_CONFIG['config_echo_name'], report.config_text)
    report.wall_clock = time.perf_counter() - started
    pending = directory.pending + [OUTPUT_CONFIG['report_name']]
    report.artifacts = {relative: str(directory.root / relative) for relative in pending}
    directory.write_json(OUTPUT_CONFIG['report_name'], report.to_dict())
    directory.finalize()

    logger.info("%s finished: %s", config.label, 'as expected' if report.matched else '; '.join(report.mismatches))
    return report


def run(config_path: Union[str, Path], output_dir: Union[str, Path, None] = None,
        overrides: Iterable[str] = ()) -> RunReport:
    """
    Load a configuration file, apply `section.key=value` overrides and run it.

    Raises:
        ConfigError: missing file, parse error or invalid override
    """
    config = load_config(config_path).apply_overrides(overrides)
    return run_config(config, output_dir)
