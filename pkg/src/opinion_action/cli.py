"""Command-line entry point: ``run``, ``sweep`` and ``verify``.

Exit status is 0 on success, 1 on a configuration or I/O error and 2 when
``verify`` finds an invariant violation.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import export, graph
from .config import ConfigError, initial_state, load_run_config, load_sweep_config
from .simulation import compare_direct_vs_matrix, run
from .state_matrix import check_row_stochastic, coefficient_bounds, save_matrix_csv, verify_bounds

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION = 0, 1, 2


def execute(config):
    """Simulate one configured run; returns ``(trajectory, report)``."""
    return run(config.params, initial_state(config), config.horizon, config.tolerances)


def write_run(config, traj, report, out_dir):
    run_dir = os.path.join(out_dir, f"run-{config.digest()}")
    os.makedirs(run_dir, exist_ok=True)
    wanted = config.outputs
    if wanted.trajectory_csv:
        export.export_trajectory(traj, os.path.join(run_dir, "trajectory.csv"))
    if wanted.report_json:
        export.export_report(report, os.path.join(run_dir, "report.json"), config.echo())
    if wanted.graphs_dot:
        gdir = os.path.join(run_dir, "graphs")
        os.makedirs(gdir, exist_ok=True)
        for s in traj.structures:
            export.export_graph(s, os.path.join(gdir, f"t{s.t}.dot"))
    if wanted.matrices_csv:
        mdir = os.path.join(run_dir, "matrices")
        os.makedirs(mdir, exist_ok=True)
        for P in traj.matrices:
            save_matrix_csv(P, os.path.join(mdir, f"t{P.t}.csv"))
    return run_dir


def run_command(config, out_dir="runs"):
    traj, report = execute(config)
    run_dir = write_run(config, traj, report, out_dir)
    print(f"{report.regime.value} stabilization_time={report.stabilization_time} -> {run_dir}")
    return run_dir


def sweep_cell(config):
    _, report = execute(config)
    return export.phase_row(config, report)


def sweep_rows(sweep, jobs=1):
    cells = sweep.cells()
    if jobs <= 1:
        return [sweep_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(sweep_cell, cells))


def sweep_command(sweep, out_dir="runs", jobs=1):
    rows = sweep_rows(sweep, jobs)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "phase_map.csv")
    export.write_phase_map(rows, path)
    print(f"{len(rows)} cells -> {path}")
    return path


def verify_checks(config):
    """Invariant suite on the configured instance; list of (name, ok, detail)."""
    traj, _ = execute(config)
    params = config.params
    results = []

    worst = max(check_row_stochastic(P)[1] for P in traj.matrices)
    nonneg = all(np.all(P.entries >= 0.0) for P in traj.matrices)
    results.append(("row_stochastic", nonneg and worst <= 1e-12, f"max row-sum deviation {worst:.3g}"))

    if 0.0 < params.phi < 1.0:
        bounds = coefficient_bounds(params)
        bad = sum(len(verify_bounds(P, bounds)[1]) for P in traj.matrices)
        results.append(("coefficient_bounds", bad == 0, f"alpha={bounds.alpha!r} beta={bounds.beta!r} violations={bad}"))
        other = sum(s.structure_class is graph.StructureClass.OTHER for s in traj.structures)
        results.append(("structure_dichotomy", other == 0, f"Other count {other}"))
        mismatched = sum(
            (s.structure_class is graph.StructureClass.STRONGLY_CONNECTED) != (not s.theta)
            for s in traj.structures
        )
        results.append(("strong_connectivity_iff_no_isolated", mismatched == 0, f"mismatches {mismatched}"))

    dev = compare_direct_vs_matrix(traj)
    results.append(("direct_vs_matrix", dev <= 1e-12, f"max deviation {dev:.3g}"))
    return results


def verify_command(config):
    results = verify_checks(config)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VIOLATION


def build_parser():
    parser = argparse.ArgumentParser(prog="opinion-action", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configured instance")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="runs")

    p = sub.add_parser("sweep", help="phase map over epsilon x phi x seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="runs")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("verify", help="check matrix and structure invariants on one instance")
    p.add_argument("--config", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            run_command(load_run_config(args.config), args.out)
        elif args.command == "sweep":
            sweep_command(load_sweep_config(args.config), args.out, args.jobs)
        else:
            return verify_command(load_run_config(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
