"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 a proven bound was violated
during an audit, 3 falsification search found nothing.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .bounds import ConjugateFamily, evaluate_all
from .falsifier import BlochThetaFamily, audit_theorems, falsify_product_relation, tightness_scan
from .linalg import LinalgError, hermitian
from .matrixio import MatrixFormatError, dumps_matrix, read_matrix
from .states import STATE_TOL, StateError, random_density, random_observable, validate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_NOT_FOUND = 3

SCAN_HEADER = ("theta", "sum_skew", "lb_nsk1", "lb_snsk2", "lb_combined", "snsk2_applicable")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for audit violations here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    tolerance: float = STATE_TOL
    grid: int = 181
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.grid < 2:
            raise CliError(f"--grid must be >= 2, got {self.grid}")
        if not self.tolerance > 0:
            raise CliError(f"--tolerance must be > 0, got {self.tolerance}")


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def scan_pauli_rows(grid: int, workers: int = 1) -> list[dict]:
    rows = []
    for theta, rep in tightness_scan(BlochThetaFamily(), grid=grid, workers=workers):
        snsk2 = rep.bounds["SNSK2"]
        rows.append(
            {
                "theta": theta,
                "sum_skew": rep.lhs_sum_skew,
                "lb_nsk1": rep.bounds["NSK1"].value,
                "lb_snsk2": snsk2.value if snsk2.applicable else None,
                "lb_combined": rep.bounds["COMBINED"].value,
                "snsk2_applicable": snsk2.applicable,
                "lambda_max_gram": None if rep.gram is None else rep.gram.max_eigenvalue(),
            }
        )
    return rows


def cmd_scan_pauli(config: RunConfig, workers: int = 1) -> int:
    rows = scan_pauli_rows(config.grid, workers)
    if config.format == "json":
        _emit(_dump(rows), config.output_path)
        return EXIT_OK
    buf = io.StringIO()
    buf.write(",".join(SCAN_HEADER) + "\n")
    for r in rows:
        cells = [
            _fmt(r["theta"]),
            _fmt(r["sum_skew"]),
            _fmt(r["lb_nsk1"]),
            "" if r["lb_snsk2"] is None else _fmt(r["lb_snsk2"]),
            _fmt(r["lb_combined"]),
            "true" if r["snsk2_applicable"] else "false",
        ]
        buf.write(",".join(cells) + "\n")
    _emit(buf.getvalue(), config.output_path)
    return EXIT_OK


def _load(path: str, what: str):
    try:
        return read_matrix(path)
    except OSError as exc:
        raise CliError(f"{path}: cannot read {what} file: {exc}") from exc
    except MatrixFormatError as exc:
        raise CliError(f"{path}: malformed {what} file: {exc}") from exc


def _load_state(path: str, tol: float):
    m = _load(path, "state")
    try:
        return validate(m, tol)
    except StateError as exc:
        raise CliError(f"{path}: invalid state ({exc.code}): {exc}") from exc


def _load_observable(path: str, dim: int, tol: float):
    m = _load(path, "observable")
    if m.shape[0] != dim:
        raise CliError(f"{path}: dim mismatch: observable has dim {m.shape[0]}, state has dim {dim}")
    try:
        return hermitian(m, tol)
    except LinalgError as exc:
        raise CliError(f"{path}: invalid observable (non-hermitian): {exc}") from exc


def cmd_evaluate(
    state_file: str, observable_files, config: RunConfig, conj_a=(), conj_b=(), conj_c=None
) -> int:
    rho = _load_state(state_file, config.tolerance)
    obs = [_load_observable(p, rho.dim, config.tolerance) for p in observable_files]
    fam = None
    if conj_a or conj_b:
        if len(conj_a) != len(conj_b):
            raise CliError(f"--conj-a and --conj-b counts differ: {len(conj_a)} vs {len(conj_b)}")
        fam = ConjugateFamily.build(
            [_load_observable(p, rho.dim, config.tolerance) for p in conj_a],
            [_load_observable(p, rho.dim, config.tolerance) for p in conj_b],
            c=None if conj_c is None else _load_observable(conj_c, rho.dim, config.tolerance),
        )
    report = evaluate_all(rho, obs, fam)
    _emit(_dump(report.to_dict()), config.output_path)
    return EXIT_OK


def cmd_audit(config: RunConfig, dims, ns, trials: int, workers: int = 1, pure_only: bool = False) -> int:
    if trials < 1:
        raise CliError(f"--trials must be >= 1, got {trials}")
    summary = audit_theorems(dims, ns, trials, config.seed, workers=workers, pure_only=pure_only)
    _emit(summary.to_json(), config.output_path)
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_falsify(
    config: RunConfig, dim: int, trials: int, pure_only: bool = False, use_witness: bool = True
) -> int:
    if dim < 2:
        raise CliError(f"--dim must be >= 2, got {dim}")
    if trials < 1:
        raise CliError(f"--trials must be >= 1, got {trials}")
    result = falsify_product_relation(
        dim, trials, config.seed, pure_only=pure_only, use_witness=use_witness
    )
    _emit(_dump(result.to_dict()), config.output_path)
    return EXIT_OK if result.found else EXIT_NOT_FOUND


def cmd_gen(config: RunConfig, dim: int, rank: int | None, count: int, kind: str = "state") -> list[Path]:
    """Write ``count`` matrix files; file ``k`` uses seed ``config.seed + k``."""
    if dim < 1 or count < 1:
        raise CliError("--dim and --count must be >= 1")
    rank = dim if rank is None else rank
    if kind == "state" and not 1 <= rank <= dim:
        raise CliError(f"--rank must be in [1, {dim}], got {rank}")
    if config.output_path is None:
        raise CliError("gen requires --out DIR")
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc}") from exc
    paths = []
    for k in range(count):
        seed = config.seed + k
        m = random_density(dim, rank, seed).matrix if kind == "state" else random_observable(dim, seed)
        p = out / f"{kind}_{k:03d}.json"
        try:
            p.write_text(dumps_matrix(m), encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {p}: {exc}") from exc
        paths.append(p)
    return paths


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wyskew", description="Skew-information sum uncertainty bounds")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=("json",)):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tolerance", type=float, default=STATE_TOL)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=fmt, default=fmt[0])

    sp = sub.add_parser("scan-pauli", help="bounds along the Bloch theta family")
    common(sp, fmt=("csv", "json"))
    sp.add_argument("--grid", type=int, default=181)
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("evaluate", help="evaluate every bound for matrix files")
    common(sp)
    sp.add_argument("state")
    sp.add_argument("observables", nargs="+")
    sp.add_argument("--conj-a", action="append", default=[], metavar="FILE")
    sp.add_argument("--conj-b", action="append", default=[], metavar="FILE")
    sp.add_argument("--conj-c", default=None, metavar="FILE", help="shared C (default: -i[A_1, B_1])")

    sp = sub.add_parser("audit", help="check every proven bound on a seeded random ensemble")
    common(sp)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--dims", type=_int_list, default=[2, 3, 4])
    sp.add_argument("--ns", type=_int_list, default=[3, 4, 5])
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--pure-only", action="store_true")

    sp = sub.add_parser("falsify", help="search for violations of the skew-information product relation")
    common(sp)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--pure-only", action="store_true")
    sp.add_argument("--no-witness", action="store_true")

    sp = sub.add_parser("gen", help="write seeded random state or observable files")
    common(sp)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--rank", type=int, default=None)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--kind", choices=("state", "observable"), default="state")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            seed=args.seed,
            tolerance=args.tolerance,
            grid=getattr(args, "grid", 181),
            output_path=args.out,
            format=args.format,
        )
        if args.command == "scan-pauli":
            return cmd_scan_pauli(config, args.workers)
        if args.command == "evaluate":
            return cmd_evaluate(
                args.state, args.observables, config, args.conj_a, args.conj_b, args.conj_c
            )
        if args.command == "audit":
            return cmd_audit(config, args.dims, args.ns, args.trials, args.workers, args.pure_only)
        if args.command == "falsify":
            return cmd_falsify(config, args.dim, args.trials, args.pure_only, not args.no_witness)
        if args.command == "gen":
            for path in cmd_gen(config, args.dim, args.rank, args.count, args.kind):
                print(path)
            return EXIT_OK
    except (CliError, ValueError) as exc:
        print(f"wyskew: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    raise AssertionError(f"unhandled command {args.command}")
