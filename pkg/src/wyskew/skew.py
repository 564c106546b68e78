"""Per-observable uncertainty quantities: skew information, standard deviation, Luo's U."""

from __future__ import annotations

import math

import numpy as np

from .linalg import DimensionMismatch, LinalgError, as_matrix, commutator, hs_norm
from .states import DensityMatrix

#: Absolute threshold below which negative round-off is clamped to zero.
NUMERIC_TOL = 1e-12


def _clamp(x: float, what: str, tol: float | None) -> float:
    tol = NUMERIC_TOL if tol is None else tol
    if x < 0.0:
        if x < -tol:
            raise LinalgError(f"{what} is negative ({x:.3e}); upstream numerical fault")
        return 0.0
    return x


def _check(rho: DensityMatrix, h) -> np.ndarray:
    h = as_matrix(h)
    if h.shape[0] != rho.dim:
        raise DimensionMismatch(f"observable has dim {h.shape[0]}, state has dim {rho.dim}")
    return h


def skew_information(rho: DensityMatrix, h, tol: float | None = None) -> float:
    """Wigner-Yanase skew information ``-Tr([sqrt(rho), h]^2) / 2``.

    Computed as half the squared Hilbert-Schmidt norm of the commutator, which
    is manifestly nonnegative.
    """
    h = _check(rho, h)
    c = commutator(rho.sqrt, h)
    return _clamp(0.5 * hs_norm(c) ** 2, "skew information", tol)


def variance(rho: DensityMatrix, h, tol: float | None = None) -> float:
    h = _check(rho, h)
    mean = rho.expect(h)
    return _clamp(rho.expect(h @ h) - mean * mean, "variance", tol)


def std_dev(rho: DensityMatrix, h, tol: float | None = None) -> float:
    return math.sqrt(variance(rho, h, tol))


def u_quantity(rho: DensityMatrix, h, tol: float | None = None) -> float:
    """Luo's ``U = sqrt(Var^2 - (Var - I)^2)``, which sits between ``I`` and ``Var``."""
    var = variance(rho, h, tol)
    skew = skew_information(rho, h, tol)
    # var^2 - (var - skew)^2 factored to avoid cancellation
    radicand = skew * (2.0 * var - skew)
    return math.sqrt(_clamp(radicand, "U radicand", tol))


def commutator_expectation(rho: DensityMatrix, a, b) -> complex:
    """``<[a, b]>_rho``; purely imaginary for Hermitian ``a``, ``b``."""
    a = _check(rho, a)
    b = _check(rho, b)
    return complex(np.trace(rho.matrix @ commutator(a, b)))


def robertson_rhs(rho: DensityMatrix, a, b) -> float:
    """``|<[a, b]>|^2 / 4``, the right-hand side shared by the product relations."""
    return 0.25 * abs(commutator_expectation(rho, a, b)) ** 2
