import numpy as np
import pytest


def random_active_state(rng, K_max=5, S_max=12, t_extra=40):
    """A random (S, t) for which the identity-based statistic exists."""
    K = int(rng.integers(2, K_max + 1))
    S = rng.integers(0, S_max + 1, size=K)
    if not S.any():
        S[0] = 1
    floor = int(S.sum() + np.count_nonzero(S))
    t = floor + int(rng.integers(1, t_extra + 1))
    return S.astype(np.int64), t


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
