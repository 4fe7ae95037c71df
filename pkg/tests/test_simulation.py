from types import SimpleNamespace

import numpy as np
import pytest

from opinion_action.graph import StructureClass, is_strongly_connected
from opinion_action.model import ModelParams, PopulationState
from opinion_action.simulation import (
    Hull,
    Regime,
    Tolerances,
    classify_regime,
    cluster_nodes,
    compare_direct_vs_matrix,
    detect_stabilization,
    hk_simulate,
    hull_distance,
    initial_population,
    limiting_digraph,
    run,
    simulate,
    spread,
    verify_lemma4,
)
from opinion_action.state_matrix import StateMatrix


def fake_structures(partitions):
    return [
        SimpleNamespace(t=t, scc=SimpleNamespace(canonical=lambda p=p: p))
        for t, p in enumerate(partitions, 1)
    ]


def uniform_start(seed, n=10):
    return initial_population(np.random.default_rng(seed).random(n))


class TestSimulate:
    def test_consensus_start_is_static(self):
        traj = simulate(ModelParams(4, 0.1, 0.5), initial_population([0.6] * 4), horizon=20)
        for s in traj.states:
            assert np.all(s.x == 0.6) and np.all(s.y == 0.6)
        assert len(traj.states) == 21 and len(traj.augmented) == 20 and len(traj.structures) == 19

    def test_lift_relation(self, rng):
        traj = simulate(ModelParams(5, 0.3, 0.4), PopulationState(0, rng.random(5), rng.random(5)), horizon=10)
        for t, z in enumerate(traj.augmented, 1):
            assert z.t == t
            assert np.array_equal(z.z, np.concatenate([traj.states[t].x, traj.states[t - 1].y]))
        assert [s.t for s in traj.structures] == list(range(1, 10))

    def test_hk_reduction(self, rng):
        x0 = rng.random(10)
        traj = simulate(ModelParams(10, 0.2, 1.0), initial_population(x0), horizon=30)
        hk = hk_simulate(x0, 0.2, max_steps=30).trajectory
        k = hk.shape[0]
        assert np.max(np.abs(traj.x[:k] - hk)) <= 1e-12
        assert np.all(traj.x[k:] == hk[-1])

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            simulate(ModelParams(2, 0.1, 0.5), initial_population([0.1, 0.2]), horizon=1)

    def test_deterministic(self):
        p = ModelParams(10, 0.05, 0.5)
        a = simulate(p, uniform_start(3), horizon=40)
        b = simulate(p, uniform_start(3), horizon=40)
        assert a.x.tobytes() == b.x.tobytes() and a.y.tobytes() == b.y.tobytes()


class TestDirectVsMatrix:
    def test_consensus(self):
        traj = simulate(ModelParams(3, 0.2, 0.5), initial_population([0.25] * 3), horizon=10)
        assert compare_direct_vs_matrix(traj) == 0.0

    @pytest.mark.parametrize("phi", [0.0, 0.3, 0.5, 0.9, 1.0])
    def test_random(self, phi, rng):
        for _ in range(5):
            n = int(rng.integers(1, 11))
            p = ModelParams(n, float(rng.random()), phi)
            traj = simulate(p, PopulationState(0, rng.random(n), rng.random(n)), horizon=50)
            assert compare_direct_vs_matrix(traj) <= 1e-12


class TestStabilization:
    def test_constant(self):
        assert detect_stabilization(fake_structures([((0, 1),)] * 15), window=10) == 1

    def test_alternating(self):
        parts = [((0, 1),), ((0,), (1,))] * 10
        assert detect_stabilization(fake_structures(parts), window=2) is None

    def test_settles_late(self):
        parts = [((0,), (1,))] * 4 + [((0, 1),)] * 12
        assert detect_stabilization(fake_structures(parts), window=10) == 5
        assert detect_stabilization(fake_structures(parts), window=13) is None

    def test_window_validated(self):
        with pytest.raises(ValueError):
            detect_stabilization([], window=0)

    def test_clustering_scenario_detected(self):
        traj = simulate(ModelParams(10, 0.05, 0.5), uniform_start(7), horizon=200)
        assert detect_stabilization(traj.structures, 10) is not None


class TestHull:
    def test_inside(self):
        assert hull_distance(0.5, Hull(0.4, 0.6)) == 0.0

    def test_above(self):
        assert hull_distance(0.7, Hull(0.4, 0.6)) == pytest.approx(0.1)

    def test_degenerate(self):
        assert hull_distance(0.2, Hull(0.5, 0.5)) == pytest.approx(0.3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Hull(0.6, 0.4)


class TestNormConformityChecks:
    def test_consensus_start(self):
        traj = simulate(ModelParams(5, 0.1, 0.0), initial_population([0.3] * 5), horizon=10)
        assert verify_lemma4(traj).ok

    def test_frozen_and_attracted(self):
        x0 = [0.52, 0.3] + [0.5] * 8
        traj = simulate(ModelParams(10, 0.05, 0.0), PopulationState(0, x0, [0.5] * 10), horizon=12)
        check = verify_lemma4(traj)
        assert check.ok
        assert 1 in check.frozen and 0 in check.attracted
        assert np.all(traj.x[1:, 1] == 0.3)
        # closed form: gap at t=1 is 0.002, then divides by 10 each step
        for t in range(1, 8):
            assert abs(traj.x[t, 0] - 0.5) == pytest.approx(0.002 * 0.1 ** (t - 1), rel=1e-9, abs=1e-16)

    def test_rejects_other_phi(self):
        traj = simulate(ModelParams(2, 0.1, 0.5), initial_population([0.1, 0.2]), horizon=3)
        with pytest.raises(ValueError):
            verify_lemma4(traj)


class TestHKSimulate:
    def test_zero_threshold(self):
        r = hk_simulate([0.1, 0.5, 0.9], 0.0)
        assert r.converged_at == 0 and len(r.cluster_values) == 3

    def test_full_threshold(self, rng):
        x0 = rng.random(6)
        r = hk_simulate(x0, 1.0)
        assert r.converged_at == 1 and len(r.cluster_values) == 1
        assert r.cluster_values[0] == pytest.approx(x0.mean(), abs=1e-15)

    def test_two_clusters(self):
        r = hk_simulate([0.0, 0.1, 0.9], 0.15)
        assert r.cluster_values == pytest.approx((0.05, 0.9))
        assert r.separated and r.cluster_values[1] - r.cluster_values[0] > 0.15

    @pytest.mark.parametrize("eps", [0.02, 0.05, 0.1, 0.3])
    def test_random_fixed_points_separated(self, eps, rng):
        for _ in range(20):
            r = hk_simulate(rng.random(12), eps)
            assert r.converged_at is not None and r.separated

    def test_budget_exhausted(self):
        r = hk_simulate(np.linspace(0, 1, 30), 0.05, max_steps=1)
        assert r.converged_at is None


class TestLimitingDigraph:
    def test_identical_window(self):
        P = StateMatrix(1, np.array([[1.0, 0.0], [0.5, 0.5]]))
        assert limiting_digraph([P, P, P]).edges == {(0, 0), (0, 1), (1, 1)}

    def test_transient_edge_dropped(self):
        P = StateMatrix(1, np.array([[1.0, 0.0], [0.5, 0.5]]))
        Q = StateMatrix(2, np.array([[0.5, 0.5], [0.5, 0.5]]))
        assert (1, 0) not in limiting_digraph([P, Q, P]).edges

    def test_empty(self):
        with pytest.raises(ValueError):
            limiting_digraph([])

    def test_consensus_run_strongly_connected(self):
        traj = simulate(ModelParams(10, 0.3, 0.5), uniform_start(11), horizon=60)
        assert is_strongly_connected(limiting_digraph(traj.matrices[-10:]))


class TestRegime:
    def test_consensus_scenario(self):
        traj, rep = run(ModelParams(10, 0.3, 0.5), uniform_start(1))
        assert rep.regime is Regime.CONSENSUS
        assert rep.spread < 1e-9 and rep.hull is None and rep.leaders == ()
        z1 = traj.augmented[0].z
        assert z1.min() <= rep.consensus_value <= z1.max()

    def test_clustering_scenario(self):
        traj, rep = run(ModelParams(10, 0.05, 0.5), uniform_start(2))
        assert rep.regime is Regime.CLUSTERING and rep.leaders
        assert all(v < 10 for v in rep.leaders)
        assert rep.leader_drift == 0.0
        assert rep.containment_residual < 1e-6
        hist = np.array(rep.residual_history)
        assert np.all(np.diff(hist) <= 1e-15)

    def test_norm_conformity(self):
        _, rep = run(ModelParams(10, 0.05, 0.0), uniform_start(3))
        assert rep.regime is Regime.NORM_CONFORMITY
        assert rep.checks["lemma4"]["ok"]

    def test_hk_routing(self):
        _, rep = run(ModelParams(10, 0.3, 1.0), uniform_start(4))
        assert rep.checks["hk_reduction"]["hk_max_deviation"] <= 1e-12

    def test_not_stabilized_without_T(self):
        traj = simulate(ModelParams(10, 0.3, 0.5), uniform_start(5), horizon=20)
        assert classify_regime(traj, None).regime is Regime.NOT_STABILIZED

    def test_consensus_start_stabilizes_at_one(self):
        _, rep = run(ModelParams(4, 0.2, 0.5), initial_population([0.4] * 4))
        assert rep.regime is Regime.CONSENSUS and rep.stabilization_time == 1

    def test_spread_monotone_when_strongly_connected(self):
        traj = simulate(ModelParams(10, 0.3, 0.5), uniform_start(6), horizon=100)
        widths = [spread(z.z) for z in traj.augmented]
        for s, a, b in zip(traj.structures, widths, widths[1:]):
            if s.structure_class is StructureClass.STRONGLY_CONNECTED:
                assert b <= a + 1e-15


def test_cluster_nodes():
    values = np.array([0.1, 0.1 + 1e-12, 0.5, 0.5, 0.9])
    assignment, clusters = cluster_nodes(values, leaders=(3,), gap=1e-9)
    assert assignment == (0, 0, 1, 2, 3)
    assert [m for _, m in clusters] == [(0, 1), (2,), (3,), (4,)]


def test_tolerance_defaults():
    tol = Tolerances()
    assert (tol.consensus, tol.containment, tol.window) == (1e-9, 1e-6, 10)
