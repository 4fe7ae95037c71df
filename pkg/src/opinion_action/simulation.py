"""Trajectories, structure stabilization and convergence-regime classification.

A run records the direct dynamics, the matching augmented states and one
structure report per state matrix.  Once the SCC partition of the
interaction digraph stops changing, the run is classified as consensus
(strongly connected tail) or clustering (frozen leader opinion nodes with
every other node drawn into the interval spanned by the leaders).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import graph
from .model import PopulationState, _mean_action, average_action, hk_step, step
from .state_matrix import assemble_state_matrix, lift, matrix_step

DEFAULT_HORIZON = 200


class Regime(str, enum.Enum):
    CONSENSUS = "Consensus"
    CLUSTERING = "Clustering"
    NORM_CONFORMITY = "NormConformity"
    NOT_STABILIZED = "NotStabilized"


@dataclass(frozen=True)
class Tolerances:
    consensus: float = 1e-9
    containment: float = 1e-6
    window: int = 10


@dataclass
class Trajectory:
    params: object
    states: list
    augmented: list
    structures: list
    matrices: list = field(default=None, repr=False)

    @property
    def horizon(self):
        return self.states[-1].t

    @property
    def x(self):
        return np.array([s.x for s in self.states])

    @property
    def y(self):
        return np.array([s.y for s in self.states])

    @property
    def z(self):
        """Augmented states stacked as rows for ``t = 1 .. horizon``."""
        return np.array([a.z for a in self.augmented])


@dataclass(frozen=True)
class Hull:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty hull [{self.lo}, {self.hi}]")

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=float)
        return cls(float(values.min()), float(values.max()))


@dataclass
class SimulationReport:
    regime: Regime
    stabilization_time: int | None
    consensus_value: float | None
    leaders: tuple
    hull: Hull | None
    containment_residual: float | None
    cluster_assignment: tuple
    clusters: list
    limit_values: np.ndarray = field(repr=False)
    spread: float = 0.0
    leader_drift: float | None = None
    residual_history: tuple = ()
    checks: dict = field(default_factory=dict)

    @property
    def leader_count(self):
        return len(self.leaders)

    @property
    def cluster_count(self):
        return len(self.clusters)


def spread(values):
    values = np.asarray(values, dtype=float)
    return float(values.max() - values.min())


def simulate(params, initial, horizon=DEFAULT_HORIZON, keep_matrices=True):
    """Iterate the model from ``initial`` (at ``t = 0``) up to ``horizon``."""
    if horizon < 2:
        raise ValueError(f"horizon must be at least 2, got {horizon}")
    if initial.t != 0:
        raise ValueError("the initial state must be at t = 0")
    if initial.n != params.n:
        raise ValueError(f"initial state has {initial.n} agents but params.n = {params.n}")

    states = [initial]
    for _ in range(horizon):
        states.append(step(states[-1], params))
    augmented = [lift(states[t].x, states[t - 1].y, t) for t in range(1, horizon + 1)]

    interior = 0.0 < params.phi < 1.0
    structures, matrices = [], []
    for z in augmented[:-1]:
        P = assemble_state_matrix(z, params)
        g = graph.digraph_of(P)
        if interior:
            structures.append(graph.classify_structure(g, z, params))
        else:
            structures.append(graph.structure_report(g, z, params))
        if keep_matrices:
            matrices.append(P)
    return Trajectory(params, states, augmented, structures, matrices if keep_matrices else None)


def compare_direct_vs_matrix(traj):
    """Largest elementwise gap between the direct run and ``z(t+1) = P(t) z(t)``."""
    z = traj.augmented[0]
    worst = 0.0
    for direct in traj.augmented[1:]:
        z = matrix_step(z, traj.params)
        worst = max(worst, float(np.max(np.abs(z.z - direct.z))))
    return worst


def detect_stabilization(structures, window=10):
    """First time from which the SCC partition stays fixed to the end.

    The final run of identical partitions must span at least ``window``
    recorded steps; otherwise None.  This is an observation over the
    recorded horizon, not a guarantee about later times.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    if not structures:
        return None
    last = structures[-1].scc.canonical()
    start = len(structures) - 1
    while start > 0 and structures[start - 1].scc.canonical() == last:
        start -= 1
    if len(structures) - start < window:
        return None
    return structures[start].t


def hull_distance(value, hull):
    if hull.lo <= value <= hull.hi:
        return 0.0
    return float(min(abs(value - hull.lo), abs(value - hull.hi)))


def _group(nodes, values, gap):
    order = sorted(nodes, key=lambda v: (values[v], v))
    groups = []
    for v in order:
        if groups and values[v] - values[groups[-1][-1]] < gap:
            groups[-1].append(v)
        else:
            groups.append([v])
    return groups


def cluster_nodes(values, leaders, gap):
    """Group nodes whose values chain together within ``gap``.

    Leaders are grouped only among themselves.  Returns the per-node cluster
    ids and a list of ``(value, members)`` ordered by value.
    """
    values = np.asarray(values, dtype=float)
    leader_set = set(leaders)
    followers = [v for v in range(values.size) if v not in leader_set]
    groups = _group(sorted(leader_set), values, gap) + _group(followers, values, gap)
    groups.sort(key=lambda g: (float(np.mean(values[g])), min(g)))
    assignment = [0] * values.size
    clusters = []
    for cid, members in enumerate(groups):
        for v in members:
            assignment[v] = cid
        clusters.append((float(_mean_action(values[members])), tuple(sorted(members))))
    return tuple(assignment), clusters


@dataclass
class NormConformityCheck:
    actions_ok: bool
    frozen_ok: bool
    decay_ok: bool
    max_action_error: float
    max_decay_error: float
    frozen: tuple
    attracted: tuple

    @property
    def ok(self):
        return self.actions_ok and self.frozen_ok and self.decay_ok

    def as_dict(self):
        return {
            "ok": self.ok,
            "actions_ok": self.actions_ok,
            "frozen_ok": self.frozen_ok,
            "decay_ok": self.decay_ok,
            "max_action_error": self.max_action_error,
            "max_decay_error": self.max_decay_error,
            "frozen": list(self.frozen),
            "attracted": list(self.attracted),
        }


def verify_lemma4(traj, action_tol=1e-12, decay_rtol=1e-12, decay_atol=4 * np.finfo(float).eps):
    """Closed-form checks for ``phi == 0``.

    Actions equal the initial average action from ``t = 1`` on.  Agents whose
    opinion at ``t = 1`` is farther than epsilon from it never move; the rest
    shrink their gap to it by a factor ``n`` per step.  The decay check
    compares ``gap(t+1)`` with ``gap(t) / n`` within
    ``decay_rtol * gap(t) / n + decay_atol``; the absolute part covers the
    rounding floor once the gap is a few ulps wide.
    """
    params = traj.params
    if params.phi != 0.0:
        raise ValueError(f"verify_lemma4 applies to phi = 0 only, got {params.phi}")
    n, eps = params.n, params.epsilon
    y_avg0 = average_action(traj.states[0])
    x, y = traj.x, traj.y

    action_err = float(np.max(np.abs(y[1:] - y_avg0)))
    x1 = x[1]
    frozen = np.abs(x1 - y_avg0) > eps
    attracted = ~frozen
    frozen_ok = bool(np.all(x[1:, frozen] == x1[frozen]))

    gaps = np.abs(x[1:, attracted] - y_avg0)
    expected = gaps[:-1] / n
    err = np.abs(gaps[1:] - expected)
    decay_ok = bool(np.all(err <= decay_rtol * expected + decay_atol))
    decay_err = float(err.max()) if err.size else 0.0

    return NormConformityCheck(
        actions_ok=action_err <= action_tol,
        frozen_ok=frozen_ok,
        decay_ok=decay_ok,
        max_action_error=action_err,
        max_decay_error=decay_err,
        frozen=tuple(np.flatnonzero(frozen).tolist()),
        attracted=tuple(np.flatnonzero(attracted).tolist()),
    )


@dataclass
class HKResult:
    trajectory: np.ndarray = field(repr=False)
    converged_at: int | None
    cluster_values: tuple
    separated: bool


def hk_simulate(x0, epsilon, max_steps=1000):
    """Iterate the Hegselmann-Krause model to an exact fixed point.

    ``converged_at`` is the first ``t`` with ``x(t+1) == x(t)``; None if no
    fixed point is reached within ``max_steps``.  ``separated`` records
    whether distinct cluster values differ by more than epsilon.
    """
    x = np.asarray(x0, dtype=float)
    traj = [x]
    converged_at = None
    for t in range(max_steps):
        nxt = hk_step(x, epsilon)
        if np.array_equal(nxt, x):
            converged_at = t
            break
        traj.append(nxt)
        x = nxt
    values = tuple(np.unique(x).tolist())
    separated = all(b - a > epsilon for a, b in zip(values, values[1:]))
    return HKResult(np.array(traj), converged_at, values, separated)


def limiting_digraph(matrices):
    """Edges positive in every matrix of the window.

    Stands in for "positive infinitely often"; exact once the positivity
    pattern has stopped changing.
    """
    matrices = list(matrices)
    if not matrices:
        raise ValueError("limiting_digraph needs at least one matrix")
    positive = np.ones_like(matrices[0].entries, dtype=bool)
    for P in matrices:
        positive &= P.entries > 0.0
    return graph.digraph_of(positive.astype(float))


def _hk_check(traj):
    x = traj.x
    eps = traj.params.epsilon
    steps = traj.horizon - 1
    hk = hk_simulate(x[1], eps, max_steps=steps)
    ref = hk.trajectory
    if ref.shape[0] < steps + 1:
        ref = np.vstack([ref, np.repeat(ref[-1:], steps + 1 - ref.shape[0], axis=0)])
    deviation = float(np.max(np.abs(x[1:] - ref)))
    return {
        "hk_max_deviation": deviation,
        "hk_converged_at": None if hk.converged_at is None else hk.converged_at + 1,
        "hk_separated": hk.separated,
    }


def classify_regime(traj, T, tolerances=Tolerances()):
    params = traj.params
    n = params.n
    z_end = traj.augmented[-1].z
    width = spread(z_end)
    checks = {}

    def report(regime, leaders=(), hull=None, residual=None, drift=None, history=()):
        assignment, clusters = cluster_nodes(z_end, leaders, 10 * tolerances.consensus)
        return SimulationReport(
            regime=regime,
            stabilization_time=T,
            consensus_value=float(_mean_action(z_end)) if regime is Regime.CONSENSUS else None,
            leaders=tuple(leaders),
            hull=hull,
            containment_residual=residual,
            cluster_assignment=assignment,
            clusters=clusters,
            limit_values=z_end.copy(),
            spread=width,
            leader_drift=drift,
            residual_history=tuple(history),
            checks=checks,
        )

    if params.phi == 0.0:
        checks["lemma4"] = verify_lemma4(traj).as_dict()
        return report(Regime.NORM_CONFORMITY)

    if params.phi == 1.0:
        checks["hk_reduction"] = _hk_check(traj)
        if width < tolerances.consensus:
            return report(Regime.CONSENSUS)
        return report(Regime.CLUSTERING, leaders=tuple(sorted(traj.structures[-1].theta)))

    if T is None:
        return report(Regime.NOT_STABILIZED)

    at_T = next(s for s in traj.structures if s.t == T)
    if at_T.structure_class is graph.StructureClass.STRONGLY_CONNECTED:
        if width < tolerances.consensus:
            return report(Regime.CONSENSUS)
        checks["note"] = "strongly connected tail but spread above consensus tolerance"
        return report(Regime.NOT_STABILIZED)

    if at_T.structure_class is graph.StructureClass.SINK_PLUS_SINGLETON_SOURCES:
        leaders = at_T.leaders
        z = traj.z[T - 1 :]  # rows for t = T .. horizon
        hull = Hull.of(z[0, list(leaders)])
        drift = float(np.max(np.abs(z[:, list(leaders)] - z[0, list(leaders)])))
        followers = sorted(at_T.omega)
        history = []
        for row in z:
            history.append(max(hull_distance(v, hull) for v in row[followers]))
        return report(
            Regime.CLUSTERING,
            leaders=leaders,
            hull=hull,
            residual=history[-1],
            drift=drift,
            history=history,
        )

    checks["note"] = "structure at stabilization is neither class; dichotomy violated"
    return report(Regime.NOT_STABILIZED)


def run(params, initial, horizon=DEFAULT_HORIZON, tolerances=Tolerances(), keep_matrices=True):
    """Simulate, detect stabilization and classify in one call."""
    traj = simulate(params, initial, horizon, keep_matrices=keep_matrices)
    T = detect_stabilization(traj.structures, tolerances.window)
    return traj, classify_regime(traj, T, tolerances)


def initial_population(x0, y0=None):
    x0 = np.asarray(x0, dtype=float)
    return PopulationState(0, x0, x0.copy() if y0 is None else np.asarray(y0, dtype=float))
