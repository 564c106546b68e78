import math

import numpy as np
import pytest

from wyskew.linalg import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z
from wyskew.states import BlochVector, from_bloch

RADIUS = math.sqrt(3) / 2


def theta_state(theta):
    return from_bloch(BlochVector(RADIUS * math.cos(theta), RADIUS * math.sin(theta), 0.0))


def eigenbasis_skew(rho_matrix, h):
    """Skew information from the spectral form 1/2 sum_jk (sqrt l_j - sqrt l_k)^2 |H_jk|^2.

    Uses only the eigen-decomposition of rho, no commutators or matrix square roots.
    Eigenvalues below 1e-14 are taken as exact zeros of a rank-deficient state.
    """
    lam, v = np.linalg.eigh(rho_matrix)
    s = np.sqrt(np.where(lam > 1e-14, lam, 0.0))
    hb = v.conj().T @ h @ v
    return 0.5 * float(np.sum((s[:, None] - s[None, :]) ** 2 * np.abs(hb) ** 2))


def eig_sqrt_oracle(m):
    # Independent square root via scipy's Schur-based algorithm.
    import scipy.linalg

    return scipy.linalg.sqrtm(m)


@pytest.fixture
def paulis():
    return SIGMA_X, SIGMA_Y, SIGMA_Z


@pytest.fixture
def identity2():
    return IDENTITY2


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
