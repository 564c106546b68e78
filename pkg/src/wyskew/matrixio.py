"""Matrix JSON format: ``{"dim": d, "matrix": [[[re, im], ...], ...]}``."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


class MatrixFormatError(ValueError):
    pass


def matrix_to_obj(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "dim": int(m.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "matrix" not in obj:
        raise MatrixFormatError('expected an object with "dim" and "matrix" keys')
    dim = obj["dim"]
    rows = obj["matrix"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixFormatError(f'"dim" must be a positive integer, got {dim!r}')
    if not isinstance(rows, list) or len(rows) != dim:
        raise MatrixFormatError(f"expected {dim} rows")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFormatError(f"row {i} is ragged: expected {dim} entries")
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in z)
                or not all(math.isfinite(p) for p in z)
            ):
                raise MatrixFormatError(f"entry ({i},{j}) must be a finite [re, im] pair")
            out[i, j] = complex(z[0], z[1])
    return out


def dumps_matrix(m: np.ndarray) -> str:
    return json.dumps(matrix_to_obj(m), indent=None) + "\n"


def write_matrix(path, m: np.ndarray) -> None:
    Path(path).write_text(dumps_matrix(m), encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"malformed JSON: {exc}") from exc
    return matrix_from_obj(obj)
