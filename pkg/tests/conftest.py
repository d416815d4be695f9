import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def hand_eig2(m):
    """Eigenvalues of a 2x2 Hermitian matrix from its characteristic polynomial."""
    tr = (m[0][0] + m[1][1]).real
    det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).real
    disc = (tr * tr / 4 - det) ** 0.5
    return sorted([tr / 2 - disc, tr / 2 + disc])


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append (number, title, passed, detail) rows; printed after the run."""
    return request.config.stash[_ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE_KEY, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(rows):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}")
