"""Density matrices, observables and their seeded random ensembles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .linalg import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    LinalgError,
    NotHermitian,
    NotPSD,
    as_matrix,
    hermitian,
    hs_norm,
    psd_sqrt,
    spectral_decompose,
)

STATE_TOL = 1e-10
BLOCH_TOL = 1e-12


class StateError(LinalgError):
    """Invalid density-matrix input.

    ``code`` names the violated invariant (``"non-hermitian"``, ``"trace"``,
    ``"non-psd"``, ``"bloch"``, ``"zero-vector"``, ``"rank"``) and
    ``magnitude`` carries the offending number.
    """

    def __init__(self, code: str, message: str, magnitude: float | None = None):
        super().__init__(message)
        self.code = code
        self.magnitude = magnitude


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state with its principal square root precomputed.

    Build through :func:`validate`, :func:`from_bloch`, :func:`from_pure` or
    :func:`random_density` rather than directly.
    """

    matrix: np.ndarray
    sqrt: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expect(self, h: np.ndarray) -> float:
        """``Re Tr(rho h)``; imaginary leakage above 1e-12 raises."""
        val = complex(np.trace(self.matrix @ h))
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise LinalgError(f"Tr(rho H) has imaginary part {val.imag:.3e}; H is not Hermitian")
        return val.real

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def length(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


class ObservableSet(Sequence):
    """Ordered, nonempty tuple of Hermitian observables of one dimension."""

    def __init__(self, observables, tol: float = 1e-10):
        obs = tuple(hermitian(o, tol) for o in observables)
        if not obs:
            raise ValueError("observable set must be nonempty")
        dims = {o.shape[0] for o in obs}
        if len(dims) != 1:
            raise LinalgError(f"observables have differing dimensions {sorted(dims)}")
        self._obs = obs

    @property
    def dim(self) -> int:
        return self._obs[0].shape[0]

    def total(self) -> np.ndarray:
        return sum(self._obs[1:], self._obs[0].copy())

    def __getitem__(self, i):
        return self._obs[i]

    def __len__(self) -> int:
        return len(self._obs)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._obs)

    def __repr__(self) -> str:
        return f"ObservableSet(n={len(self)}, dim={self.dim})"


def validate(m, tol: float = STATE_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity, then build the state."""
    a = as_matrix(m)
    try:
        h = hermitian(a, tol)
    except NotHermitian as exc:
        dev = float(np.max(np.abs(a - a.conj().T)))
        raise StateError("non-hermitian", str(exc), dev) from exc
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > tol:
        raise StateError("trace", f"trace must be 1, got {tr:.12g}", tr)
    lam_min = float(spectral_decompose(h).eigenvalues[0])
    if lam_min < -tol:
        raise StateError(
            "non-psd", f"state is not positive semi-definite: min eigenvalue {lam_min:.6g}", lam_min
        )
    try:
        root = psd_sqrt(h, clamp_tol=tol)
    except NotPSD as exc:
        raise StateError("non-psd", str(exc), lam_min) from exc
    return DensityMatrix(matrix=h, sqrt=root)


def from_bloch(b: BlochVector) -> DensityMatrix:
    r = b.length
    if r > 1 + BLOCH_TOL:
        raise StateError("bloch", f"Bloch vector length {r:.12g} exceeds 1", r)
    rho = (IDENTITY2 + b.x * SIGMA_X + b.y * SIGMA_Y + b.z * SIGMA_Z) / 2
    return DensityMatrix(matrix=rho, sqrt=psd_sqrt(rho, clamp_tol=1e-9))


def from_pure(v) -> DensityMatrix:
    v = np.asarray(v, dtype=np.complex128).ravel()
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise StateError("zero-vector", "cannot build a pure state from the zero vector", 0.0)
    v = v / n
    rho = np.outer(v, v.conj())
    rho = (rho + rho.conj().T) / 2
    # A rank-one projector is its own square root.
    return DensityMatrix(matrix=rho, sqrt=rho)


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre-induced random state ``W W^dagger / Tr(W W^dagger)`` with ``W`` of shape (dim, rank)."""
    if dim < 1 or not 1 <= rank <= dim:
        raise StateError("rank", f"need 1 <= rank <= dim, got rank={rank}, dim={dim}", rank)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = w @ w.conj().T
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    if rank == 1:
        return DensityMatrix(matrix=rho, sqrt=rho)
    return DensityMatrix(matrix=rho, sqrt=psd_sqrt(rho))


def random_pure(dim: int, seed: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    return from_pure(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_observable(dim: int, seed: int) -> np.ndarray:
    """Seeded random Hermitian matrix scaled to Hilbert-Schmidt norm ``dim``."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (w + w.conj().T) / 2
    h *= dim / hs_norm(h)
    return (h + h.conj().T) / 2
