#!/usr/bin/env python3
"""
MCF Lab - Mean Curvature Flow and Self-Expander Laboratory
==========================================================
Evolves curves and rotationally symmetric hypersurfaces by mean curvature
flow and its rescaled variants, and checks monotone quantities against
expected verdicts.

Usage:
    python main.py run circle.cfg --out runs
    python main.py sweep 'configs/*.cfg' --jobs 4
    python main.py expander --n 2 --u0 1.0 --tol 1e-6
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from core.errors import FlowTermination, LabError
from expanders.solver import solve_graph_expander
from geometry.compute import compute_geometry
from sim.runner import run
from sim.sweep import sweep
from utils.data_io import RunDirectory, to_jsonable

logger = logging.getLogger('mcf_lab')


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s %(levelname)-8s %(name)s: %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
    )
    logging.captureWarnings(True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mcf-lab',
        description='Mean curvature flow and self-expander laboratory.',
    )
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging verbosity on stderr.')
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', help='Run one scenario configuration.')
    run_parser.add_argument('config', help='Configuration file (bare names resolve against configs/).')
    run_parser.add_argument('--out', type=Path, default=None,
                            help='Output root (default: $MCF_LAB_OUTPUT_ROOT or ./runs).')
    run_parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='SECTION.KEY=VALUE',
                            help='Override a configuration entry; repeatable.')

    sweep_parser = commands.add_parser('sweep', help='Run every configuration matching a glob.')
    sweep_parser.add_argument('pattern', help='Glob of configuration files.')
    sweep_parser.add_argument('--jobs', type=int, default=1, help='Worker processes (default: 1).')
    sweep_parser.add_argument('--out', type=Path, default=None, help='Output root shared by all runs.')
    sweep_parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='SECTION.KEY=VALUE',
                              help='Override applied to every configuration; repeatable.')

    expander_parser = commands.add_parser('expander', help='Solve for a graphical rotational expander.')
    expander_parser.add_argument('--n', type=int, required=True, help='Dimension of the hypersurface.')
    expander_parser.add_argument('--u0', type=float, required=True, help='Height on the axis.')
    expander_parser.add_argument('--tol', type=float, default=1e-6, help='Residual tolerance.')
    expander_parser.add_argument('--r-max', type=float, default=20.0, help='End of the radial grid.')
    expander_parser.add_argument('--out', type=Path, default=None,
                                 help='Directory for the profile CSV and its sidecar; omitted prints only.')
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    report = run(args.config, args.out, args.overrides)
    print(report.summary())
    return 0 if report.matched else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise LabError(f"--jobs must be at least 1, got {args.jobs}")
    report = sweep(args.pattern, args.jobs, args.out, args.overrides)
    print(report.render())
    return 0 if report.matched else 1


def _cmd_expander(args: argparse.Namespace) -> int:
    try:
        profile = solve_graph_expander(args.n, args.u0, r_max=args.r_max, tol=args.tol)
    except ValueError as exc:
        raise LabError(str(exc))
    summary = profile.sidecar()
    if args.out is not None:
        directory = RunDirectory(args.out)
        name = f"expander_n{args.n}_u{args.u0:g}.csv"
        directory.write_snapshot(name, compute_geometry(profile.snapshot()), summary)
        summary['artifacts'] = directory.finalize()
    print(json.dumps(to_jsonable(summary), indent=2, sort_keys=True))
    return 0


COMMANDS = {'run': _cmd_run, 'sweep': _cmd_sweep, 'expander': _cmd_expander}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except FlowTermination as exc:
        print(f"error: unexpected termination: {exc}", file=sys.stderr)
        return 3
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
