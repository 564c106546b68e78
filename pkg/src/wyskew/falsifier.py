"""Randomized search and audits.

Three jobs live here: searching for violations of the (false) skew-information
product relation ``I(A) I(B) >= |<[A, B]>|^2 / 4``, auditing every proven bound
over a seeded random ensemble, and scanning bounds along a one-parameter
family of states.

Instance ``i`` of any batch is drawn from ``numpy.random.default_rng(seed + i)``,
so results do not depend on how instances are distributed over workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .bounds import (
    BOUND_IDS,
    BoundReport,
    evaluate_all,
    generalized_product_bounds,
    pair_sqrt_bound,
    pair_sum_bound,
)
from .linalg import PAULIS, SIGMA_X, SIGMA_Y
from .matrixio import matrix_from_obj, matrix_to_obj
from .skew import robertson_rhs, skew_information, u_quantity, variance
from .states import (
    BlochVector,
    DensityMatrix,
    from_bloch,
    random_density,
    random_observable,
    random_pure,
    validate,
)

FALSIFY_THRESHOLD = 1e-8
AUDIT_TOL = 1e-9
IDENTITY_TOL = 1e-10
PURE_TOL = 1e-9
QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)


def classify_margin(margin: float, threshold: float = FALSIFY_THRESHOLD) -> str:
    """``"counterexample"`` above ``threshold``, ``"inconclusive"`` in (0, threshold], else ``"holds"``."""
    if margin > threshold:
        return "counterexample"
    if margin > 0.0:
        return "inconclusive"
    return "holds"


@dataclass
class Counterexample:
    rho: DensityMatrix
    a: np.ndarray
    b: np.ndarray
    lhs: float
    rhs: float
    source: str = "sampled"

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @classmethod
    def evaluate(cls, rho: DensityMatrix, a, b, source: str = "sampled") -> "Counterexample":
        lhs = skew_information(rho, a) * skew_information(rho, b)
        return cls(rho, np.asarray(a), np.asarray(b), lhs, robertson_rhs(rho, a, b), source)

    def revalidate(self, threshold: float = FALSIFY_THRESHOLD) -> bool:
        again = Counterexample.evaluate(self.rho, self.a, self.b)
        return classify_margin(again.margin, threshold) == "counterexample"

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "rho": matrix_to_obj(self.rho.matrix),
            "a": matrix_to_obj(self.a),
            "b": matrix_to_obj(self.b),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Counterexample":
        rho = validate(matrix_from_obj(d["rho"]))
        return cls.evaluate(
            rho, matrix_from_obj(d["a"]), matrix_from_obj(d["b"]), d.get("source", "sampled")
        )


def canned_witness() -> Counterexample:
    """rho = diag(0.9, 0.1) with sigma_x, sigma_y: product 0.16 against 0.64."""
    rho = validate(np.diag([0.9, 0.1]))
    return Counterexample.evaluate(rho, SIGMA_X, SIGMA_Y, source="witness")


@dataclass
class FalsificationResult:
    counterexample: Counterexample | None
    trials: int
    inconclusive: int = 0

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "trials": self.trials,
            "inconclusive": self.inconclusive,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


def _sample_pair_instance(dim: int, seed: int, pure_only: bool):
    rng = np.random.default_rng(seed)
    s_state, s_a, s_b = (int(x) for x in rng.integers(0, 2**62, size=3))
    if pure_only:
        rho = random_pure(dim, s_state)
    else:
        rank = int(rng.integers(1, dim + 1))
        rho = random_density(dim, rank, s_state)
    return rho, random_observable(dim, s_a), random_observable(dim, s_b)


def falsify_product_relation(
    dim: int,
    trials: int,
    seed: int,
    *,
    pure_only: bool = False,
    use_witness: bool = True,
    threshold: float = FALSIFY_THRESHOLD,
) -> FalsificationResult:
    """Look for ``(rho, A, B)`` with ``I(A) I(B) + threshold < |<[A, B]>|^2 / 4``.

    For ``dim == 2`` the known witness is tried first unless ``use_witness`` is
    false or only pure states are requested.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if dim == 2 and use_witness and not pure_only:
        w = canned_witness()
        if classify_margin(w.margin, threshold) == "counterexample":
            return FalsificationResult(w, 0)
    inconclusive = 0
    for t in range(trials):
        rho, a, b = _sample_pair_instance(dim, seed + t, pure_only)
        cand = Counterexample.evaluate(rho, a, b)
        verdict = classify_margin(cand.margin, threshold)
        if verdict == "counterexample":
            return FalsificationResult(cand, t + 1, inconclusive)
        if verdict == "inconclusive":
            inconclusive += 1
    return FalsificationResult(None, trials, inconclusive)


# --- theorem audit -----------------------------------------------------------


@dataclass
class AuditSummary:
    trials: int
    violations: list[dict] = field(default_factory=list)
    slack_histogram: dict[str, dict[str, float]] = field(default_factory=dict)
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "checks": self.checks,
            "ok": self.ok,
            "violations": self.violations,
            "slack_histogram": self.slack_histogram,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _relative(lhs: float, slack: float) -> float:
    return slack / max(lhs, 1e-15)


def audit_instance(
    index: int,
    *,
    dims: Sequence[int],
    ns: Sequence[int],
    seed: int,
    pure_only: bool = False,
    evaluate: Callable = evaluate_all,
) -> tuple[dict, list[tuple[str, float, float]]]:
    """Run every check on instance ``index``.

    Returns the instance descriptor and a list of ``(check, lhs, slack)``; a
    check is violated when its slack is below ``-AUDIT_TOL``.
    """
    rng = np.random.default_rng(seed + index)
    dim = int(rng.choice(dims))
    n = int(rng.choice(ns))
    rank = 1 if pure_only else int(rng.integers(1, dim + 1))
    subseeds = [int(x) for x in rng.integers(0, 2**62, size=1 + 2 * n)]
    rho = random_pure(dim, subseeds[0]) if pure_only else random_density(dim, rank, subseeds[0])
    obs = [random_observable(dim, s) for s in subseeds[1 : n + 1]]
    others = [random_observable(dim, s) for s in subseeds[n + 1 :]]
    desc = {"index": index, "seed": seed + index, "dim": dim, "n": n, "rank": rank}

    out: list[tuple[str, float, float]] = []
    report: BoundReport = evaluate(rho, obs)
    for k, e in report.bounds.items():
        if e.applicable:
            out.append((k, e.lhs, e.slack))

    skews = report.skews
    for i, j in combinations(range(n), 2):
        a, b = obs[i], obs[j]
        lhs = skews[i] + skews[j]
        out.append(("PAIR_SUM", lhs, lhs - pair_sum_bound(rho, a, b)))
        lhs_sqrt = math.sqrt(skews[i]) + math.sqrt(skews[j])
        out.append(("PAIR_SQRT", lhs_sqrt, lhs_sqrt - pair_sqrt_bound(rho, a, b)))
        half = 0.5 * (skew_information(rho, a + b) + skew_information(rho, a - b))
        # exact identity: scale-aware tolerance, reported as negative slack when off
        err = abs(lhs - half)
        out.append(("PARALLELOGRAM", lhs, -err if err > IDENTITY_TOL * max(1.0, lhs) else 0.0))

    if n >= 3:
        pair_sum = math.fsum(skew_information(rho, a + b) for a, b in combinations(obs, 2))
        weak = pair_sum / (2 * (n - 1))
        out.append(("NSK1_DOMINANCE", report.bounds["NSK1"].value, report.bounds["NSK1"].value - weak))
        nsk2 = report.bounds["NSK2"].value
        out.append(("NSK2_DOMINANCE", nsk2, nsk2 - report.bounds["SUM_SQRT"].value))

    if report.gram is not None:
        bad = report.gram.violations()
        out.append(("GRAM", 1.0, -1.0 if bad else 0.0))

    us = []
    for h in obs:
        skew, u, var = skew_information(rho, h), u_quantity(rho, h), variance(rho, h)
        us.append(u)
        out.append(("ORDER_SKEW_U", u, u - skew))
        out.append(("ORDER_U_VAR", var, var - u))
        if pure_only:
            err = abs(skew - var)
            out.append(("PURE_REDUCTION", var, -err if err > PURE_TOL else 0.0))
    sq = math.fsum(map(math.sqrt, us)) ** 2
    out.append(("RUXP_VS_UXP", sq, sq - math.fsum(us)))

    gen = generalized_product_bounds(rho, obs, others)
    for name, chk in (("XP_GENERAL", gen.xp), ("UXP_GENERAL", gen.uxp), ("RUXP_GENERAL", gen.ruxp)):
        out.append((name, chk.lhs, chk.slack))
    return desc, out


def _order_key(check: str) -> tuple[int, str]:
    return (BOUND_IDS.index(check), check) if check in BOUND_IDS else (len(BOUND_IDS), check)


def audit_theorems(
    dims: Sequence[int],
    ns: Sequence[int],
    trials: int,
    seed: int,
    *,
    pure_only: bool = False,
    workers: int = 1,
    evaluate: Callable = evaluate_all,
) -> AuditSummary:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not dims or not ns or min(dims) < 1 or min(ns) < 1:
        raise ValueError("dims and ns must be nonempty lists of positive integers")
    job = partial(
        audit_instance, dims=list(dims), ns=list(ns), seed=seed, pure_only=pure_only, evaluate=evaluate
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(trials), chunksize=max(1, trials // (4 * workers))))
    else:
        results = [job(i) for i in range(trials)]

    summary = AuditSummary(trials=trials)
    rel: dict[str, list[float]] = {}
    for desc, checks in results:
        for check, lhs, slack in checks:
            summary.checks += 1
            if slack < -AUDIT_TOL:
                summary.violations.append({**desc, "check": check, "slack": slack})
            if check in BOUND_IDS or check in ("PAIR_SUM", "PAIR_SQRT"):
                rel.setdefault(check, []).append(_relative(lhs, slack))
    for check in sorted(rel, key=_order_key):
        q = np.quantile(np.asarray(rel[check]), QUANTILES)
        summary.slack_histogram[check] = {f"{p:g}": float(v) for p, v in zip(QUANTILES, q)}
    return summary


# --- tightness scans ---------------------------------------------------------


@dataclass(frozen=True)
class BlochThetaFamily:
    """Qubit states with Bloch vector ``radius * (cos t, sin t, 0)``, t over [start, stop]."""

    radius: float = math.sqrt(3) / 2
    start: float = 0.0
    stop: float = 2 * math.pi

    def state(self, t: float) -> DensityMatrix:
        return from_bloch(BlochVector(self.radius * math.cos(t), self.radius * math.sin(t), 0.0))

    def grid(self, points: int) -> np.ndarray:
        return np.linspace(self.start, self.stop, points)


FAMILIES = {"pauli-theta": BlochThetaFamily}


def _scan_point(t: float, family, obs) -> tuple[float, BoundReport]:
    return float(t), evaluate_all(family.state(t), obs)


def tightness_scan(
    family, observables=None, grid: int = 181, workers: int = 1
) -> list[tuple[float, BoundReport]]:
    """Evaluate every bound at ``grid`` evenly spaced parameters, endpoints included."""
    if isinstance(family, str):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
        family = FAMILIES[family]()
    if not hasattr(family, "state") or not hasattr(family, "grid"):
        raise ValueError(f"invalid family descriptor {family!r}")
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    obs = PAULIS if observables is None else observables
    job = partial(_scan_point, family=family, obs=obs)
    ts = family.grid(grid)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, ts, chunksize=max(1, len(ts) // (4 * workers))))
    return [job(t) for t in ts]
