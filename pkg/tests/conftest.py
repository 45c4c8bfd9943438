import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccnsim.config import SimConfig  # noqa: E402
from ccnsim.engine import Simulation  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def static_sim(coords, scheme="ccn", keep_log=True, trace=True, **overrides):
    """Simulation with pinned nodes and no generated queries."""
    cfg = SimConfig(scheme=scheme, queries_enabled=False, **overrides)
    return Simulation(cfg, keep_log=keep_log, trace=trace,
                      static_positions=np.asarray(coords, dtype=float))


@pytest.fixture
def make_static_sim():
    return static_sim


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
