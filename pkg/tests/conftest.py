import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def taylor_expm(A, terms=30):
    """Plain truncated power series; an independent check on scipy's Pade expm."""
    A = np.asarray(A, dtype=complex)
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def random_diagonalizable(rng, n, real_spectrum=False):
    S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    S += n * np.eye(n)
    D = rng.normal(size=n) * 3
    if not real_spectrum:
        D = D + 1j * rng.normal(size=n)
    return S @ np.diag(D) @ np.linalg.inv(S)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda l: int(l.split("[")[1].split("]")[0])):
        terminalreporter.write_line(line)
