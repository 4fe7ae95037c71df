"""Interaction digraph of a state matrix and its structural analysis.

A matrix entry ``p[i, j] > 0`` is read as an edge ``j -> i``: node ``i``
listens to node ``j``.  Nodes ``0 .. n-1`` are opinion nodes and
``n .. 2n-1`` are action nodes.

For ``0 < phi < 1`` the digraph is either strongly connected, or its
condensation is one sink component plus singleton sources made of the
opinion nodes of agents that have no neighbours (the leaders).
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .state_matrix import StateMatrix, augmented_neighbor_mask

logger = logging.getLogger(__name__)

MAX_CUT_BALANCE_NODES = 16


class CapacityError(ValueError):
    """Raised when an exhaustive check would exceed its node budget."""


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes ``0 .. node_count-1``.

    ``edges`` holds ``(source, target)`` pairs; self-loops are allowed.  A
    digraph built from a matrix keeps that matrix so edge weights can be
    looked up.
    """

    node_count: int
    edges: frozenset
    matrix: np.ndarray = field(default=None, compare=False, repr=False)
    _adj: np.ndarray = field(default=None, compare=False, repr=False)

    def adjacency(self):
        """Boolean matrix with ``A[source, target]`` set for every edge."""
        if self._adj is not None:
            return self._adj.copy()
        A = np.zeros((self.node_count, self.node_count), dtype=bool)
        for u, v in self.edges:
            A[u, v] = True
        return A

    def weight(self, source, target):
        if self.matrix is None or (source, target) not in self.edges:
            return None
        return float(self.matrix[target, source])

    @classmethod
    def from_adjacency(cls, A):
        A = np.array(A, dtype=bool)
        src, dst = np.nonzero(A)
        return cls(A.shape[0], frozenset(zip(src.tolist(), dst.tolist())), _adj=A)


@dataclass(frozen=True)
class SccPartition:
    components: tuple
    component_of: tuple

    def canonical(self):
        return tuple(tuple(sorted(c)) for c in self.components)


class StructureClass(str, enum.Enum):
    STRONGLY_CONNECTED = "StronglyConnected"
    SINK_PLUS_SINGLETON_SOURCES = "SinkPlusSingletonSources"
    OTHER = "Other"


@dataclass(frozen=True)
class StructureReport:
    t: int
    n: int
    graph: Digraph = field(repr=False)
    scc: SccPartition
    condensation_edges: frozenset
    structure_class: StructureClass
    leaders: tuple
    omega: frozenset
    theta: frozenset


def digraph_of(P):
    A = P.entries if isinstance(P, StateMatrix) else np.asarray(P, dtype=float)
    positive = A > 0.0
    rows, cols = np.nonzero(positive)
    edges = frozenset(zip(cols.tolist(), rows.tolist()))
    return Digraph(A.shape[0], edges, matrix=A, _adj=positive.T.copy())


def _successors(g):
    A = g.adjacency()
    return [np.flatnonzero(row).tolist() for row in A]


def _tarjan(succ):
    """Iterative Tarjan; yields each SCC as a list of nodes."""
    index, low = {}, {}
    on_stack = set()
    stack = []
    counter = 0
    for root in range(len(succ)):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            for k in range(i, len(succ[v])):
                w = succ[v][k]
                if w not in index:
                    work.append((v, k + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                yield comp
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])


def strongly_connected_components(g):
    """SCC decomposition, components ordered by their smallest node."""
    components = sorted((frozenset(c) for c in _tarjan(_successors(g))), key=min)
    component_of = [0] * g.node_count
    for idx, comp in enumerate(components):
        for node in comp:
            component_of[node] = idx
    return SccPartition(tuple(components), tuple(component_of))


def condensation(g, scc):
    edges = set()
    for u, v in g.edges:
        a, b = scc.component_of[u], scc.component_of[v]
        if a != b:
            edges.add((a, b))
    return Digraph(len(scc.components), frozenset(edges))


def sources_and_sinks(c):
    has_in = {v for u, v in c.edges if u != v}
    has_out = {u for u, v in c.edges if u != v}
    nodes = set(range(c.node_count))
    return frozenset(nodes - has_in), frozenset(nodes - has_out)


def _omega_theta(z, params):
    counts = augmented_neighbor_mask(z, params).sum(axis=1)
    n = params.n
    theta = frozenset(np.flatnonzero(counts == 0).tolist())
    omega = frozenset(range(2 * n)) - theta
    return omega, theta


def omega_theta_partition(z, params):
    """Split the 2n nodes into ``omega`` (action nodes and opinion nodes with
    at least one neighbour) and ``theta`` (opinion nodes with none)."""
    if not 0.0 < params.phi < 1.0:
        raise ValueError(f"the omega/theta partition needs 0 < phi < 1, got {params.phi}")
    return _omega_theta(z, params)


def _classify(scc, cond, theta):
    if len(scc.components) == 1:
        return StructureClass.STRONGLY_CONNECTED
    sources, sinks = sources_and_sinks(cond)
    if len(sinks) != 1:
        return StructureClass.OTHER
    others = [c for c in range(len(scc.components)) if c not in sinks]
    if not all(c in sources and len(scc.components[c]) == 1 for c in others):
        return StructureClass.OTHER
    singles = frozenset(next(iter(scc.components[c])) for c in others)
    if singles != theta:
        return StructureClass.OTHER
    return StructureClass.SINK_PLUS_SINGLETON_SOURCES


def structure_report(g, z, params):
    """Structure of ``g`` for any ``phi``.

    Outside ``0 < phi < 1`` the dichotomy is not guaranteed and ``Other`` is a
    legitimate outcome.
    """
    scc = strongly_connected_components(g)
    cond = condensation(g, scc)
    omega, theta = _omega_theta(z, params)
    cls = _classify(scc, cond, theta)
    leaders = tuple(sorted(theta)) if cls is StructureClass.SINK_PLUS_SINGLETON_SOURCES else ()
    return StructureReport(
        t=z.t,
        n=params.n,
        graph=g,
        scc=scc,
        condensation_edges=cond.edges,
        structure_class=cls,
        leaders=leaders,
        omega=omega,
        theta=theta,
    )


def classify_structure(g, z, params):
    if not 0.0 < params.phi < 1.0:
        raise ValueError(f"structure classification needs 0 < phi < 1, got {params.phi}")
    report = structure_report(g, z, params)
    if report.structure_class is StructureClass.OTHER:
        logger.error(
            "digraph at t=%d is neither strongly connected nor sink plus singleton "
            "sources (components=%s, theta=%s)",
            z.t,
            report.scc.canonical(),
            sorted(report.theta),
        )
    return report


def _subset_masks(node_count):
    codes = np.arange(1, 2**node_count - 1, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(node_count)) & 1
    return bits.astype(bool)


def cut_balance_exhaustive(g):
    """Check cut-balance over every nonempty proper node subset.

    For each subset ``S``, an edge entering ``S`` from outside must exist
    exactly when an edge leaving ``S`` exists.  Returns ``(ok, S)`` with the
    first violating subset in binary-counting order, or ``(True, None)``.
    """
    m = g.node_count
    if m > MAX_CUT_BALANCE_NODES:
        raise CapacityError(
            f"exhaustive cut-balance is limited to {MAX_CUT_BALANCE_NODES} nodes "
            f"(got {m}); use strong connectivity as the sufficient check instead"
        )
    if m < 2:
        return True, None
    A = g.adjacency().astype(np.int32)
    inside = _subset_masks(m)
    outside = ~inside
    # (S @ A)[s, v] > 0 iff some node of subset s has an edge to v
    into = ((outside.astype(np.int32) @ A) > 0) & inside
    out_of = ((inside.astype(np.int32) @ A) > 0) & outside
    bad = np.flatnonzero(into.any(axis=1) != out_of.any(axis=1))
    if bad.size == 0:
        return True, None
    return False, frozenset(np.flatnonzero(inside[bad[0]]).tolist())


def reachability(g):
    """Transitive closure by repeated boolean squaring (reflexive)."""
    R = g.adjacency() | np.eye(g.node_count, dtype=bool)
    while True:
        nxt = R | ((R.astype(np.int32) @ R.astype(np.int32)) > 0)
        if np.array_equal(nxt, R):
            return R
        R = nxt


def is_strongly_connected(g):
    return len(strongly_connected_components(g).components) == 1


def node_label(node, n):
    return f"x{node + 1}" if node < n else f"y{node - n + 1}"


def edge_class(source, target, n):
    """Block of origin of an edge: opinion/action for source then target."""
    kind = lambda v: "o" if v < n else "a"
    return kind(source) + kind(target)


def to_dot(report, name="G"):
    """Render a structure report as a DOT digraph.

    Opinion nodes are ``x1..xn``, action nodes ``y1..yn``.  Each edge has a
    ``class`` attribute ``oo``, ``oa``, ``ao`` or ``aa`` and leader opinion
    nodes carry ``leader=true``.
    """
    n = report.n
    g = report.graph
    lines = [f"digraph {name} {{"]
    lines.append(f'  label="t={report.t} {report.structure_class.value}";')
    for v in range(g.node_count):
        attrs = [f'kind="{"opinion" if v < n else "action"}"']
        if v in report.leaders:
            attrs.append("leader=true")
        lines.append(f"  {node_label(v, n)} [{', '.join(attrs)}];")
    for u, v in sorted(g.edges):
        attrs = [f"class={edge_class(u, v, n)}"]
        w = g.weight(u, v)
        if w is not None:
            attrs.append(f'p="{w!r}"')
        lines.append(f"  {node_label(u, n)} -> {node_label(v, n)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
