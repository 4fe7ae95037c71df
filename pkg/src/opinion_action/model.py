"""Agent-level dynamics of the opinion-action coevolution model.

Each agent holds a private opinion ``x_i`` and a public action ``y_i`` in
[0, 1].  One time step is sequential: opinions are revised from the actions
of bounded-confidence neighbours, then actions are revised from the new
opinion and the group's average action.

Agents are indexed from 0 in every array.  The classical Hegselmann-Krause
update is included as the baseline the model reduces to when ``phi == 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Population size ``n``, confidence threshold ``epsilon`` and decision
    weight ``phi``."""

    n: int
    epsilon: float
    phi: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "phi", float(self.phi))


def _as_unit_vector(v, name):
    a = np.array(v, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if a.size and (np.any(~np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PopulationState:
    """Opinions ``x`` and actions ``y`` of all agents at time ``t``."""

    t: int
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("time index must be nonnegative")
        x = _as_unit_vector(self.x, "x")
        y = _as_unit_vector(self.y, "y")
        if x.shape != y.shape:
            raise ValueError(f"x and y lengths differ: {x.size} != {y.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.x.size


@dataclass(frozen=True)
class NeighborSets:
    """Neighbour sets at time ``t`` stored as a boolean matrix.

    ``mask[i, j]`` is True when agent ``j`` is a neighbour of agent ``i``.
    The diagonal is always False.
    """

    t: int
    mask: np.ndarray = field(repr=False)

    @property
    def sets(self):
        return [frozenset(np.flatnonzero(row).tolist()) for row in self.mask]

    @property
    def counts(self):
        return self.mask.sum(axis=1)


def _check_dims(state, params):
    if state.n != params.n:
        raise ValueError(f"state has {state.n} agents but params.n = {params.n}")


def neighbor_mask(x, y, epsilon):
    """Boolean matrix of ``|x_i - y_j| <= epsilon`` for ``j != i``.

    The comparison is inclusive, so with ``epsilon == 0`` only exact
    equality makes a neighbour.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    mask = np.abs(x[:, None] - y[None, :]) <= epsilon
    np.fill_diagonal(mask, False)
    return mask


def neighbor_sets(state, params):
    _check_dims(state, params)
    return NeighborSets(state.t, neighbor_mask(state.x, state.y, params.epsilon))


def _masked_mean(values, mask):
    """Row-wise mean of ``values`` over ``mask``.

    Every row must select at least one entry.  The mean is taken about the
    row minimum of the selected entries, so rows whose selected entries are
    all equal return that value exactly, and rows with identical inputs
    return bit-identical results.
    """
    ref = np.where(mask, values, np.inf).min(axis=1)
    top = np.where(mask, values, -np.inf).max(axis=1)
    shifted = np.where(mask, values - ref[:, None], 0.0)
    return np.clip(ref + shifted.sum(axis=1) / mask.sum(axis=1), ref, top)


def _opinion_average(x, y, mask):
    # each agent averages its own opinion with its neighbours' actions
    values = np.broadcast_to(y, mask.shape).copy()
    np.fill_diagonal(values, x)
    own = mask | np.eye(x.size, dtype=bool)
    return _masked_mean(values, own)


def update_opinions(state, nbrs, params):
    """Opinions at ``t + 1``: the mean of the agent's own opinion and its
    neighbours' actions.  Agents without neighbours keep their opinion."""
    _check_dims(state, params)
    if nbrs.mask.shape != (params.n, params.n):
        raise ValueError("neighbour mask does not match population size")
    return _opinion_average(state.x, state.y, nbrs.mask)


def _mean_action(y):
    # shifted so a constant vector averages to itself exactly
    return y[0] + np.mean(y - y[0])


def average_action(state):
    return float(_mean_action(state.y))


def action_response(x, y_prev, phi):
    """``phi * x + (1 - phi) * mean(y_prev)``, elementwise in ``x``.

    Shared by the direct action update and by the reconstruction of actions
    from the augmented state, so both paths agree bit for bit.
    """
    x = np.asarray(x, dtype=float)
    if phi == 1.0:
        return x.copy()
    avg = _mean_action(np.asarray(y_prev, dtype=float))
    return avg + phi * (x - avg)


def update_actions(x_next, state, params):
    _check_dims(state, params)
    x_next = np.asarray(x_next, dtype=float)
    if x_next.shape != (params.n,):
        raise ValueError("x_next does not match population size")
    return action_response(x_next, state.y, params.phi)


def step(state, params):
    """Advance the population by one sequential opinion-then-action update."""
    nbrs = neighbor_sets(state, params)
    x_next = update_opinions(state, nbrs, params)
    y_next = update_actions(x_next, state, params)
    return PopulationState(state.t + 1, x_next, y_next)


def hk_neighbor_mask(x, epsilon):
    x = np.asarray(x, dtype=float)
    return np.abs(x[:, None] - x[None, :]) <= epsilon


def hk_step(x, epsilon):
    """One Hegselmann-Krause update; each agent counts itself as a neighbour."""
    x = np.asarray(x, dtype=float)
    values = np.broadcast_to(x, (x.size, x.size))
    return _masked_mean(values, hk_neighbor_mask(x, epsilon))
