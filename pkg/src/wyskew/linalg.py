"""Dense complex-matrix kernel.

Everything here works on plain ``numpy.ndarray`` values of dtype ``complex128``.
Hermitian inputs are symmetrized on the way in so downstream code can rely on
exact Hermiticity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-10
CLAMP_TOL = 1e-10
IMAG_DUST_TOL = 1e-12


class LinalgError(ValueError):
    """Raised for malformed or numerically invalid matrix input."""


class DimensionMismatch(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class NotPSD(LinalgError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise LinalgError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return ``(m + m^dagger)/2`` after checking ``m`` is Hermitian within ``tol``.

    The deviation is measured entrywise (max-abs). Raises :class:`NotHermitian`
    when it exceeds ``tol``.
    """
    a = as_matrix(m)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol:
        raise NotHermitian(f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e} > {tol:.1e}")
    return (a + a.conj().T) / 2


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dagger b)``."""
    a = as_matrix(a)
    b = as_matrix(b)
    _check_dims(a, b)
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    val = hs_inner(a, a)
    if abs(val.imag) > IMAG_DUST_TOL * max(1.0, abs(val.real)):
        raise LinalgError(f"Tr(a^dagger a) has imaginary part {val.imag:.3e}")
    return float(np.sqrt(max(val.real, 0.0)))


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    _check_dims(a, b)
    return a @ b - b @ a


def spectral_decompose(m) -> SpectralDecomposition:
    m = as_matrix(m)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise LinalgError(f"eigen-solver did not converge: {exc}") from exc
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def psd_sqrt(m, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of a positive semi-definite Hermitian matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are rounding noise from rank deficiency
    and are clamped to zero; anything more negative raises :class:`NotPSD`.
    Positive eigenvalues below ``dim * eps * lambda_max`` are zeroed as well,
    since the square root would amplify their noise to ~1e-8.
    """
    dec = spectral_decompose(m)
    w = dec.eigenvalues
    if w[0] < -clamp_tol:
        raise NotPSD(f"matrix is not positive semi-definite: min eigenvalue {w[0]:.3e}")
    floor = len(w) * np.finfo(float).eps * max(w[-1], 0.0)
    root = np.sqrt(np.where(w > floor, w, 0.0))
    v = dec.eigenvectors
    s = (v * root) @ v.conj().T
    return (s + s.conj().T) / 2


def max_eigenvalue(m) -> float:
    return float(spectral_decompose(m).eigenvalues[-1])


IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
