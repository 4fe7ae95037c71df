"""Augmented state ``z(t) = [x(t); y(t-1)]`` and its state matrix ``P(t)``.

For ``t >= 1`` the coupled dynamics collapse to the linear time-varying
recursion ``z(t+1) = P(t) z(t)`` with a 2n x 2n row-stochastic ``P(t)``::

    P = [[P11, P12],
         [P21, P22]]

Only the upper blocks depend on the neighbour sets; ``P21 = phi * I`` and
``P22 = (1 - phi) / n * ones`` are fixed for given parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import action_response, neighbor_mask

BOUND_SLACK = 1e-15
# matrix products may overshoot [0, 1] by a few ulps
RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class AugmentedState:
    t: int
    z: np.ndarray

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("the augmented state is only defined for t >= 1")
        z = np.array(self.z, dtype=float)
        if z.ndim != 1 or z.size % 2 or z.size == 0:
            raise ValueError("z must be a nonempty vector of even length")
        if np.any(~np.isfinite(z)) or z.min() < -RANGE_SLACK or z.max() > 1.0 + RANGE_SLACK:
            raise ValueError("z entries must lie in [0, 1]")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def n(self):
        return self.z.size // 2

    @property
    def opinions(self):
        return self.z[: self.n]

    @property
    def previous_actions(self):
        return self.z[self.n :]


@dataclass(frozen=True)
class StateMatrix:
    t: int
    entries: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.entries.shape[0] // 2

    @property
    def P11(self):
        n = self.n
        return self.entries[:n, :n]

    @property
    def P12(self):
        n = self.n
        return self.entries[:n, n:]

    @property
    def P21(self):
        n = self.n
        return self.entries[n:, :n]

    @property
    def P22(self):
        n = self.n
        return self.entries[n:, n:]


class CoefficientBounds(NamedTuple):
    alpha: float
    beta: float


def lift(x_next, y_prev, t=1):
    """Stack opinions at ``t`` and actions at ``t - 1`` into ``z(t)``."""
    x = np.asarray(x_next, dtype=float)
    y = np.asarray(y_prev, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be vectors of equal length")
    return AugmentedState(t, np.concatenate([x, y]))


def _check_z(z, params):
    if z.n != params.n:
        raise ValueError(f"augmented state has {z.n} agents but params.n = {params.n}")


def reconstruct_actions(z, params):
    """Recover ``y(t)`` from ``z(t)`` through the action update rule."""
    _check_z(z, params)
    return action_response(z.opinions, z.previous_actions, params.phi)


def augmented_neighbor_mask(z, params):
    return neighbor_mask(z.opinions, reconstruct_actions(z, params), params.epsilon)


def assemble_state_matrix(z, params):
    n, phi = params.n, params.phi
    mask = augmented_neighbor_mask(z, params)
    k = mask.sum(axis=1)
    denom = (k + 1).astype(float)

    P = np.zeros((2 * n, 2 * n))
    p11 = np.where(mask, phi, 0.0) / denom[:, None]
    p11[np.diag_indices(n)] = 1.0 / denom
    P[:n, :n] = p11
    P[:n, n:] = ((1.0 - phi) * k / (denom * n))[:, None]
    P[n:, :n] = phi * np.eye(n)
    P[n:, n:] = (1.0 - phi) / n
    return StateMatrix(z.t, P)


def matrix_step(z, params):
    """``z(t+1) = P(t) z(t)``.

    Averaging rows act on ``z - min(z)`` so a constant vector maps to itself
    exactly; rows with a single unit entry use the plain product, which
    copies the value bit for bit.
    """
    A = assemble_state_matrix(z, params).entries
    base = float(z.z.min())
    shifted = A @ (z.z - base) + base
    single = np.count_nonzero(A, axis=1) == 1
    return AugmentedState(z.t + 1, np.where(single, A @ z.z, shifted))


def _entries(P):
    return P.entries if isinstance(P, StateMatrix) else np.asarray(P, dtype=float)


def check_row_stochastic(P, tol=1e-12):
    """Return ``(ok, max_deviation)`` for nonnegativity and unit row sums."""
    A = _entries(P)
    deviation = float(np.max(np.abs(A.sum(axis=1) - 1.0))) if A.size else 0.0
    return bool(np.all(A >= 0.0) and deviation <= tol), deviation


def coefficient_bounds(params):
    """Closed-form lower bounds on positive entries (alpha) and on the
    diagonal (beta).  Only meaningful for ``0 < phi < 1``."""
    n, phi = params.n, params.phi
    if not 0.0 < phi < 1.0:
        raise ValueError(f"coefficient bounds need 0 < phi < 1, got phi = {phi}")
    alpha = min(phi / n, (1.0 - phi) / (2 * n), phi, (1.0 - phi) / n)
    beta = min(1.0 / n, (1.0 - phi) / n)
    return CoefficientBounds(alpha, beta)


def verify_bounds(P, bounds, slack=BOUND_SLACK):
    """Check positive entries against ``alpha`` and the diagonal against
    ``beta``.

    Returns ``(ok, violations)`` where each violation is ``(i, j, value)``.
    """
    A = _entries(P)
    violations = []
    low = (A > 0.0) & (A < bounds.alpha - slack)
    for i, j in zip(*np.nonzero(low)):
        violations.append((int(i), int(j), float(A[i, j])))
    diag = np.diagonal(A)
    for i in np.flatnonzero(diag < bounds.beta - slack):
        if not low[i, i]:
            violations.append((int(i), int(i), float(diag[i])))
    return not violations, violations


def save_matrix_csv(P, path):
    """Write the matrix row-major as CSV with round-trip float precision."""
    A = _entries(P)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in A:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_matrix_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)
