import json
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conormal_lab.geometry import FlatTorus, HyperbolicSurface, RoundSphere

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FROZEN_PATH = os.path.join(os.path.dirname(__file__), "oracles", "frozen.json")

# per-criterion lines from test_acceptance, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def frozen():
    with open(FROZEN_PATH) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def torus():
    return FlatTorus(2)


@pytest.fixture(scope="session")
def sphere():
    return RoundSphere(2)


@pytest.fixture(scope="session")
def bolza():
    return HyperbolicSurface.bolza()


def random_states(model, n, seed):
    """Random unit phase states on any of the three model surfaces."""
    rng = np.random.default_rng(seed)
    if isinstance(model, FlatTorus):
        X = rng.random((n, model.dim))
        XI = rng.normal(size=(n, model.dim))
        XI /= np.linalg.norm(XI, axis=1, keepdims=True)
        return X, XI
    if isinstance(model, RoundSphere):
        X = rng.normal(size=(n, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        V = rng.normal(size=(n, 3))
        V -= np.sum(V * X, axis=1, keepdims=True) * X
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        return X, V
    th = rng.uniform(-np.pi, np.pi, n)
    X = np.tile([0.0, 1.0], (n, 1))
    XI = np.stack([np.cos(th), np.sin(th)], axis=1)
    X, XI = model.normalize_states(X, XI)
    return model.flow_states(X, XI, rng.uniform(0.0, 4.0, n))
