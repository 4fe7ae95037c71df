import numpy as np
import pytest

from opinion_action.model import ModelParams, PopulationState

ACCEPTANCE_RESULTS = []


def record(criterion, ok, detail):
    ACCEPTANCE_RESULTS.append((criterion, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion:>2}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_state(rng, n, t=0):
    return PopulationState(t, rng.random(n), rng.random(n))


def random_params(rng, n=None, phi=None):
    n = int(rng.integers(1, 11)) if n is None else n
    return ModelParams(n, float(rng.random()), float(rng.random()) if phi is None else phi)
