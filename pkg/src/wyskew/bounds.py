"""Sum-uncertainty lower bounds built from skew information.

Each ``*_bound`` function returns the lower bound on its own; :func:`evaluate_all`
collects every bound for one (state, observables) instance into a
:class:`BoundReport` together with the matching left-hand sides and slacks.

Bound identifiers and the quantity each one bounds from below:

========== ==========================================================
PAIR_SUM   I(A) + I(B) >= max(I(A+B), I(A-B)) / 2
PAIR_SQRT  sqrt I(A) + sqrt I(B) >= max(sqrt I(A+B), sqrt I(A-B))
SUM_SQRT   sum sqrt I(A_i) >= sqrt I(sum A_i)
NSK1       sum I(A_i), pairwise-sum bound (N >= 3)
NSK2       sum sqrt I(A_i), pairwise-sum bound (N >= 3)
SNSK2      sum I(A_i) >= I(sum A_i) / lambda_max(G)
COMBINED   max of NSK1 and SNSK2
XP         (sum std A_i)(sum std B_j) >= N |<C>| / 2
UXP        (sum sqrt U(A_i))(sum sqrt U(B_j)) >= N |<C>| / 2
RUXP       (sum U(A_i))(sum U(B_j)) >= N |<C>|^2 / 4
========== ==========================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .linalg import (
    DimensionMismatch,
    LinalgError,
    as_matrix,
    commutator,
    hermitian,
    hs_inner,
    hs_norm,
    max_eigenvalue,
    spectral_decompose,
)
from .skew import commutator_expectation, skew_information, std_dev, u_quantity
from .states import DensityMatrix, ObservableSet

BOUND_IDS = (
    "PAIR_SUM",
    "PAIR_SQRT",
    "SUM_SQRT",
    "NSK1",
    "NSK2",
    "SNSK2",
    "COMBINED",
    "XP",
    "UXP",
    "RUXP",
)

SUM_SKEW_BOUNDS = ("PAIR_SUM", "NSK1", "SNSK2", "COMBINED")
SUM_SQRT_BOUNDS = ("PAIR_SQRT", "SUM_SQRT", "NSK2")

SKEW_ZERO_TOL = 1e-12
STRUCTURE_TOL = 1e-9
REPORT_TOL = 1e-9


class BoundNotApplicable(Exception):
    """A bound's precondition fails for this instance; ``str(exc)`` is the reason."""


def _as_set(observables) -> ObservableSet:
    if isinstance(observables, ObservableSet):
        return observables
    return ObservableSet(observables)


def _check_dim(rho: DensityMatrix, obs: ObservableSet) -> None:
    if obs.dim != rho.dim:
        raise DimensionMismatch(f"observables have dim {obs.dim}, state has dim {rho.dim}")


def _pair_skews(rho, obs) -> list[float]:
    return [skew_information(rho, a + b) for a, b in combinations(obs, 2)]


# --- two observables ---------------------------------------------------------


def pair_sum_bound(rho: DensityMatrix, a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    return 0.5 * max(skew_information(rho, a + b), skew_information(rho, a - b))


def pair_sqrt_bound(rho: DensityMatrix, a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    return math.sqrt(max(skew_information(rho, a + b), skew_information(rho, a - b)))


# --- N observables -----------------------------------------------------------


def sum_sqrt_bound(rho: DensityMatrix, observables) -> float:
    obs = _as_set(observables)
    _check_dim(rho, obs)
    return math.sqrt(skew_information(rho, obs.total()))


def _require_three(n: int) -> None:
    if n < 3:
        raise BoundNotApplicable(f"requires N >= 3 (got N={n}); use the pair bounds for N = 2")


def nsk1_from_pairs(pair_skews: Sequence[float], n: int) -> float:
    """Pairwise-sum bound on ``sum I(A_i)`` from the values ``I(A_i + A_j)``, i < j."""
    _require_three(n)
    s2 = math.fsum(pair_skews)
    s1 = math.fsum(math.sqrt(v) for v in pair_skews)
    return (s2 - s1 * s1 / (n - 1) ** 2) / (n - 2)


def nsk2_from_pairs(pair_skews: Sequence[float], total_skew: float, n: int) -> float:
    _require_three(n)
    s1 = math.fsum(math.sqrt(v) for v in pair_skews)
    return (s1 - math.sqrt(total_skew)) / (n - 2)


def n_sum_bound_nsk1(rho: DensityMatrix, observables) -> float:
    obs = _as_set(observables)
    _check_dim(rho, obs)
    _require_three(len(obs))
    return nsk1_from_pairs(_pair_skews(rho, obs), len(obs))


def n_sqrt_bound_nsk2(rho: DensityMatrix, observables) -> float:
    obs = _as_set(observables)
    _check_dim(rho, obs)
    _require_three(len(obs))
    total = skew_information(rho, obs.total())
    return nsk2_from_pairs(_pair_skews(rho, obs), total, len(obs))


@dataclass(frozen=True)
class GramMatrix:
    """``G_ij = Tr(X_i X_j)`` for the unit-norm Hermitian directions ``X_i = i[sqrt rho, A_i] / ||.||``."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def max_eigenvalue(self) -> float:
        return max_eigenvalue(self.entries)

    def violations(self, diag_tol=1e-10, psd_tol=1e-9, sym_tol=1e-12) -> list[str]:
        g = self.entries
        out = []
        d = float(np.max(np.abs(np.diag(g) - 1.0)))
        if d > diag_tol:
            out.append(f"diagonal deviates from 1 by {d:.3e}")
        s = float(np.max(np.abs(g - g.T)))
        if s > sym_tol:
            out.append(f"asymmetry {s:.3e}")
        lam = spectral_decompose(g).eigenvalues
        if lam[0] < -psd_tol:
            out.append(f"min eigenvalue {lam[0]:.3e}")
        if not (1.0 - psd_tol <= lam[-1] <= self.n + psd_tol):
            out.append(f"lambda_max {lam[-1]:.6g} outside [1, {self.n}]")
        return out


def gram_matrix(rho: DensityMatrix, observables, skew_tol: float = SKEW_ZERO_TOL) -> GramMatrix:
    obs = _as_set(observables)
    _check_dim(rho, obs)
    xs = []
    for k, a in enumerate(obs):
        u = commutator(rho.sqrt, a)
        norm = hs_norm(u)
        if 0.5 * norm * norm <= skew_tol:
            raise BoundNotApplicable(
                f"I(A_{k + 1}) = {0.5 * norm * norm:.3e} is zero; Gram bound needs every I(A_i) > 0"
            )
        xs.append(hermitian(1j * u / norm, tol=1e-10))
    n = len(xs)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            z = hs_inner(xs[i], xs[j])
            if abs(z.imag) > 1e-10:
                raise LinalgError(f"Gram entry ({i},{j}) has imaginary part {z.imag:.3e}")
            g[i, j] = g[j, i] = z.real
    return GramMatrix(g)


def gram_bound_snsk2(
    rho: DensityMatrix, observables, skew_tol: float = SKEW_ZERO_TOL
) -> tuple[float, GramMatrix]:
    obs = _as_set(observables)
    g = gram_matrix(rho, obs, skew_tol)
    return skew_information(rho, obs.total()) / g.max_eigenvalue(), g


def combined_bound(rho: DensityMatrix, observables) -> float:
    obs = _as_set(observables)
    lb1 = n_sum_bound_nsk1(rho, obs)
    try:
        lb2, _ = gram_bound_snsk2(rho, obs)
    except BoundNotApplicable:
        return lb1
    return max(lb1, lb2)


# --- conjugate families ------------------------------------------------------


@dataclass(frozen=True)
class ConjugateFamily:
    """Two observable sets with ``[A_i, B_j] = i delta_ij C``.

    ``C`` is read off as ``-i[A_1, B_1]`` unless given explicitly;
    ``structure_residual`` is the largest Frobenius deviation from the required
    commutation pattern.
    """

    a_set: ObservableSet
    b_set: ObservableSet
    c: np.ndarray
    structure_residual: float
    tol: float = STRUCTURE_TOL

    @classmethod
    def build(cls, a_set, b_set, c=None, tol: float = STRUCTURE_TOL) -> "ConjugateFamily":
        a_set, b_set = _as_set(a_set), _as_set(b_set)
        if len(a_set) != len(b_set):
            raise ValueError(f"A and B sets differ in size: {len(a_set)} vs {len(b_set)}")
        if a_set.dim != b_set.dim:
            raise DimensionMismatch(f"A and B sets differ in dimension: {a_set.dim} vs {b_set.dim}")
        if c is None:
            c = -1j * commutator(a_set[0], b_set[0])
            c = (c + c.conj().T) / 2
        else:
            c = hermitian(c)
            if c.shape[0] != a_set.dim:
                raise DimensionMismatch(f"C has dim {c.shape[0]}, observables have dim {a_set.dim}")
        residual = 0.0
        for i, a in enumerate(a_set):
            for j, b in enumerate(b_set):
                target = 1j * c if i == j else 0.0
                residual = max(residual, float(np.linalg.norm(commutator(a, b) - target)))
        return cls(a_set, b_set, c, residual, tol)

    @property
    def n(self) -> int:
        return len(self.a_set)

    @property
    def verified(self) -> bool:
        return self.structure_residual <= self.tol


@dataclass(frozen=True)
class ProductCheck:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class ConjugateBounds:
    xp: ProductCheck
    uxp: ProductCheck
    ruxp: ProductCheck


def conjugate_product_bounds(rho: DensityMatrix, fam: ConjugateFamily) -> ConjugateBounds:
    if not fam.verified:
        raise BoundNotApplicable(
            f"[A_i, B_j] = i delta_ij C fails: residual {fam.structure_residual:.3e} > {fam.tol:.1e}"
        )
    if fam.a_set.dim != rho.dim:
        raise DimensionMismatch(f"family has dim {fam.a_set.dim}, state has dim {rho.dim}")
    n = fam.n
    c_mean = abs(rho.expect(fam.c))
    sd_a = math.fsum(std_dev(rho, a) for a in fam.a_set)
    sd_b = math.fsum(std_dev(rho, b) for b in fam.b_set)
    u_a = [u_quantity(rho, a) for a in fam.a_set]
    u_b = [u_quantity(rho, b) for b in fam.b_set]
    return ConjugateBounds(
        xp=ProductCheck(sd_a * sd_b, 0.5 * n * c_mean),
        uxp=ProductCheck(
            math.fsum(map(math.sqrt, u_a)) * math.fsum(map(math.sqrt, u_b)), 0.5 * n * c_mean
        ),
        ruxp=ProductCheck(math.fsum(u_a) * math.fsum(u_b), 0.25 * n * c_mean * c_mean),
    )


def generalized_product_bounds(rho: DensityMatrix, a_set, b_set) -> ConjugateBounds:
    """Termwise product relations for arbitrary sets, no commutation structure needed.

    ``xp``: Robertson summed over all (i, j); ``uxp`` and ``ruxp``: the U-based
    product relation summed over all (i, j), in square-root and plain form.
    """
    a_set, b_set = _as_set(a_set), _as_set(b_set)
    comm = [
        abs(commutator_expectation(rho, a, b)) for a in a_set for b in b_set
    ]
    sd_a = math.fsum(std_dev(rho, a) for a in a_set)
    sd_b = math.fsum(std_dev(rho, b) for b in b_set)
    u_a = [u_quantity(rho, a) for a in a_set]
    u_b = [u_quantity(rho, b) for b in b_set]
    half_sum = 0.5 * math.fsum(comm)
    return ConjugateBounds(
        xp=ProductCheck(sd_a * sd_b, half_sum),
        uxp=ProductCheck(math.fsum(map(math.sqrt, u_a)) * math.fsum(map(math.sqrt, u_b)), half_sum),
        ruxp=ProductCheck(math.fsum(u_a) * math.fsum(u_b), 0.25 * math.fsum(x * x for x in comm)),
    )


# --- Hilbert-space chains behind the N-observable bounds ---------------------


def square_norm_chain(us: Sequence[np.ndarray]) -> tuple[float, float, float]:
    """``(sum ||u_i||^2, pairwise-sum bound, sum_{i<j} ||u_i + u_j||^2 / (2(N-1)))``; non-increasing."""
    n = len(us)
    _require_three(n)
    pair = [hs_norm(u + v) for u, v in combinations(us, 2)]
    s2 = math.fsum(p * p for p in pair)
    s1 = math.fsum(pair)
    return (
        math.fsum(hs_norm(u) ** 2 for u in us),
        (s2 - s1 * s1 / (n - 1) ** 2) / (n - 2),
        s2 / (2 * (n - 1)),
    )


def norm_chain(us: Sequence[np.ndarray]) -> tuple[float, float, float]:
    """``(sum ||u_i||, pairwise-sum bound, ||sum u_i||)``; non-increasing."""
    n = len(us)
    _require_three(n)
    total = hs_norm(sum(us[1:], us[0]))
    s1 = math.fsum(hs_norm(u + v) for u, v in combinations(us, 2))
    return math.fsum(hs_norm(u) for u in us), (s1 - total) / (n - 2), total


# --- report ------------------------------------------------------------------


@dataclass
class BoundEntry:
    value: float | None
    applicable: bool
    reason: str
    lhs: float | None = None

    @property
    def slack(self) -> float | None:
        if not self.applicable or self.value is None or self.lhs is None:
            return None
        return self.lhs - self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "applicable": self.applicable,
            "reason": self.reason,
            "slack": self.slack,
            "lhs": self.lhs,
        }


@dataclass
class BoundReport:
    lhs_sum_skew: float
    lhs_sum_sqrt_skew: float
    bounds: dict[str, BoundEntry]
    gram: GramMatrix | None = field(default=None, repr=False)
    skews: tuple[float, ...] = ()

    def _dominant(self, ids) -> str | None:
        best, best_val = None, -math.inf
        for k in ids:
            e = self.bounds[k]
            if k != "COMBINED" and e.applicable and e.value > best_val:
                best, best_val = k, e.value
        return best

    @property
    def dominant_bound(self) -> str | None:
        """Largest applicable bound on ``sum I(A_i)`` (COMBINED is excluded since it ties by definition)."""
        return self._dominant(SUM_SKEW_BOUNDS)

    @property
    def dominant_sqrt_bound(self) -> str | None:
        return self._dominant(SUM_SQRT_BOUNDS)

    def violations(self, tol: float = REPORT_TOL) -> list[tuple[str, float]]:
        return [
            (k, e.slack)
            for k, e in self.bounds.items()
            if e.applicable and e.slack is not None and e.slack < -tol
        ]

    def to_dict(self) -> dict:
        return {
            "lhs_sum_skew": self.lhs_sum_skew,
            "lhs_sum_sqrt_skew": self.lhs_sum_sqrt_skew,
            "bounds": {k: self.bounds[k].to_dict() for k in BOUND_IDS},
            "dominant_bound": self.dominant_bound,
            "dominant_sqrt_bound": self.dominant_sqrt_bound,
            "lambda_max_gram": None if self.gram is None else self.gram.max_eigenvalue(),
        }


def _na(reason: str) -> BoundEntry:
    return BoundEntry(None, False, reason)


def evaluate_all(
    rho: DensityMatrix, observables, fam: ConjugateFamily | None = None
) -> BoundReport:
    """Evaluate every bound; inapplicable ones are recorded with a reason instead of raising."""
    obs = _as_set(observables)
    _check_dim(rho, obs)
    n = len(obs)
    skews = tuple(skew_information(rho, a) for a in obs)
    lhs1 = math.fsum(skews)
    lhs2 = math.fsum(math.sqrt(s) for s in skews)
    total_skew = skew_information(rho, obs.total())
    pairs = _pair_skews(rho, obs) if n >= 3 else []
    b: dict[str, BoundEntry] = {}

    if n == 2:
        b["PAIR_SUM"] = BoundEntry(pair_sum_bound(rho, obs[0], obs[1]), True, "", lhs1)
        b["PAIR_SQRT"] = BoundEntry(pair_sqrt_bound(rho, obs[0], obs[1]), True, "", lhs2)
    else:
        b["PAIR_SUM"] = _na(f"pair bound needs exactly 2 observables (got N={n})")
        b["PAIR_SQRT"] = _na(f"pair bound needs exactly 2 observables (got N={n})")

    b["SUM_SQRT"] = BoundEntry(math.sqrt(total_skew), True, "", lhs2)

    if n >= 3:
        b["NSK1"] = BoundEntry(nsk1_from_pairs(pairs, n), True, "", lhs1)
        b["NSK2"] = BoundEntry(nsk2_from_pairs(pairs, total_skew, n), True, "", lhs2)
    else:
        reason = f"requires N >= 3 (got N={n}); use the pair bounds for N = 2"
        b["NSK1"] = _na(reason)
        b["NSK2"] = _na(reason)

    gram = None
    if n < 2:
        b["SNSK2"] = _na("Gram bound is the identity I(A_1) >= I(A_1) for N = 1")
    else:
        try:
            gram = gram_matrix(rho, obs)
            b["SNSK2"] = BoundEntry(total_skew / gram.max_eigenvalue(), True, "", lhs1)
        except BoundNotApplicable as exc:
            b["SNSK2"] = _na(str(exc))

    if n >= 3:
        vals = [b[k].value for k in ("NSK1", "SNSK2") if b[k].applicable]
        reason = "" if b["SNSK2"].applicable else "SNSK2 inapplicable; equals NSK1"
        b["COMBINED"] = BoundEntry(max(vals), True, reason, lhs1)
    else:
        b["COMBINED"] = _na(f"requires N >= 3 (got N={n})")

    if fam is None:
        for k in ("XP", "UXP", "RUXP"):
            b[k] = _na("no conjugate family supplied")
    else:
        try:
            cb = conjugate_product_bounds(rho, fam)
        except BoundNotApplicable as exc:
            for k in ("XP", "UXP", "RUXP"):
                b[k] = _na(str(exc))
        else:
            for k, chk in (("XP", cb.xp), ("UXP", cb.uxp), ("RUXP", cb.ruxp)):
                b[k] = BoundEntry(chk.rhs, True, "", chk.lhs)

    return BoundReport(lhs1, lhs2, {k: b[k] for k in BOUND_IDS}, gram=gram, skews=skews)
