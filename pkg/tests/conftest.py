import numpy as np
import pytest


def max_abs(a, b=None):
    a = np.asarray(a)
    return float(np.max(np.abs(a if b is None else a - np.asarray(b))))


def unitarity_defect(M):
    return max_abs(M @ M.conj().T, np.eye(M.shape[0]))


def dense_c(g):
    n = len(g) + 1
    C = np.zeros((n, n))
    for k, v in enumerate(g):
        C[k, k + 1] = C[k + 1, k] = v
    return C


def eigh_expm(C, t):
    """Third, test-only route to exp(-itC): LAPACK symmetric eigensolver."""
    lam, V = np.linalg.eigh(C)
    return (V * np.exp(-1j * t * lam)) @ V.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
