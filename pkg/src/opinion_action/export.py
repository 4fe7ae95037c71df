"""File formats: trajectory CSV, DOT snapshots, report JSON, phase-map rows.

All files number agents and nodes from 1, matching the usual convention of
opinion nodes ``1..n`` followed by action nodes ``n+1..2n``.  Floats are
written with ``repr`` so they round-trip exactly.
"""
from __future__ import annotations

import csv
import json

from .graph import to_dot

TRAJECTORY_HEADER = ("t", "agent", "x", "y")
PHASE_MAP_HEADER = (
    "epsilon",
    "phi",
    "seed",
    "regime",
    "stabilization_time",
    "cluster_count",
    "leader_count",
    "containment_residual",
    "consensus_spread",
)


def _num(v):
    return "" if v is None else repr(v)


def export_trajectory(traj, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        for state in traj.states:
            for i, (x, y) in enumerate(zip(state.x.tolist(), state.y.tolist()), 1):
                w.writerow((state.t, i, repr(x), repr(y)))


def read_trajectory(path):
    """Parse a trajectory CSV into ``{t: (x list, y list)}``."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            xs, ys = out.setdefault(int(row["t"]), ([], []))
            xs.append(float(row["x"]))
            ys.append(float(row["y"]))
    return out


def export_graph(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_dot(report, name=f"t{report.t}"))


def report_to_dict(report, config_echo=None):
    """JSON-ready dict with a fixed key order."""
    hull = None
    if report.hull is not None:
        hull = {"lo": report.hull.lo, "hi": report.hull.hi}
    return {
        "regime": report.regime.value,
        "stabilization_time": report.stabilization_time,
        "consensus_value": report.consensus_value,
        "consensus_spread": report.spread,
        "leaders": [v + 1 for v in report.leaders],
        "hull": hull,
        "containment_residual": report.containment_residual,
        "leader_drift": report.leader_drift,
        "clusters": [
            {"id": cid, "value": value, "members": [v + 1 for v in members]}
            for cid, (value, members) in enumerate(report.clusters)
        ],
        "limit_values": report.limit_values.tolist(),
        "checks": report.checks,
        "config": config_echo or {},
    }


def export_report(report, path, config_echo=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report, config_echo), fh, indent=2)
        fh.write("\n")


def phase_row(config, report):
    return (
        repr(config.epsilon),
        repr(config.phi),
        str(config.seed),
        report.regime.value,
        _num(report.stabilization_time),
        str(report.cluster_count),
        str(report.leader_count),
        _num(report.containment_residual),
        repr(report.spread),
    )


def write_phase_map(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PHASE_MAP_HEADER)
        w.writerows(rows)
