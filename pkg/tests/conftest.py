import numpy as np
import pytest

from momidx import catalog


def random_hpd(rng, n, cond=1e3):
    """Random (n+1)x(n+1) Hermitian positive definite matrix with bounded condition number."""
    a = rng.standard_normal((n + 1, n + 1)) + 1j * rng.standard_normal((n + 1, n + 1))
    q, _ = np.linalg.qr(a)
    ev = np.geomspace(1.0, 1.0 / cond, n + 1)
    s = (q * ev) @ q.conj().T
    return (s + s.conj().T) / 2


def half_geometric_section(n):
    """Toeplitz section with entries (-1)^(j-k) / 2^|j-k|, built directly."""
    j = np.arange(n + 1)
    d = j[:, None] - j[None, :]
    return ((-0.5) ** np.abs(d)).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def toeplitz_t():
    return catalog.geometric_toeplitz(0.5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
