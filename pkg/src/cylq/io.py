"""CSV and JSON persistence for tables, states and operators.

CSV files start with one comment line ``# cylq <command> seed=<seed> ...``,
then a header row. Floats are written with 17 significant digits so every
value round-trips bit-for-bit.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .core import AngleGrid, FourierState, OperatorMatrix

FMT = "%.16e"


def _f(x: float) -> str:
    return FMT % x


def _header(command: str, seed: Optional[int], extra: dict | None) -> str:
    parts = [f"# cylq {command}", f"seed={seed if seed is not None else 'none'}"]
    for k, v in (extra or {}).items():
        parts.append(f"{k}={v}")
    return " ".join(parts) + "\n"


def write_table_csv(path: str | Path, momenta: Iterable[float], grid: AngleGrid,
                    values: np.ndarray, command: str, seed: Optional[int] = None,
                    complex_values: bool = True, extra: dict | None = None) -> None:
    """Rows ``m, theta, re, im`` (or ``m, theta, w`` for real tables)."""
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        fh.write(_header(command, seed, extra))
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["m", "theta", "re", "im"] if complex_values else ["m", "theta", "w"])
        for i, m in enumerate(momenta):
            ms = str(int(m)) if float(m).is_integer() else repr(float(m))
            for k, th in enumerate(grid.points):
                v = values[i, k]
                if complex_values:
                    wr.writerow([ms, _f(th), _f(v.real), _f(v.imag)])
                else:
                    wr.writerow([ms, _f(th), _f(float(np.real(v)))])


def read_table_csv(path: str | Path) -> tuple[dict, np.ndarray, AngleGrid, np.ndarray]:
    """Inverse of :func:`write_table_csv`: (header fields, momenta, grid, values)."""
    with open(path, newline="") as fh:
        first = fh.readline()
        meta = parse_header(first)
        rd = csv.reader(fh)
        cols = next(rd)
        rows = [r for r in rd if r]
    ms = np.array([float(r[0]) for r in rows])
    th = np.array([float(r[1]) for r in rows])
    momenta = np.unique(ms)
    K = len(rows) // len(momenta)
    if len(cols) == 4:
        vals = np.array([float(r[2]) + 1j * float(r[3]) for r in rows])
    else:
        vals = np.array([float(r[2]) for r in rows])
    grid = AngleGrid(K)
    if not np.allclose(th[:K], grid.points, rtol=0, atol=1e-15):
        raise ValueError(f"{path}: theta column is not a uniform grid of size {K}")
    return meta, momenta, grid, vals.reshape(len(momenta), K)


def parse_header(line: str) -> dict:
    if not line.startswith("# cylq"):
        raise ValueError("missing '# cylq' header line")
    toks = line[2:].split()
    meta = {"command": toks[1] if len(toks) > 1 else ""}
    for t in toks[2:]:
        k, _, v = t.partition("=")
        meta[k] = v
    return meta


def _jsonable(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError("non-finite value cannot be serialized")
    return float(x)


def operator_to_dict(A: OperatorMatrix, seed: Optional[int] = None, **extra) -> dict:
    e = A.entries
    d = {"n_max": A.n_max, "seed": seed,
         "re": [[_jsonable(v) for v in row] for row in e.real],
         "im": [[_jsonable(v) for v in row] for row in e.imag]}
    d.update(extra)
    return d


def operator_from_dict(d: dict) -> OperatorMatrix:
    e = np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
    return OperatorMatrix(int(d["n_max"]), e)


def write_json(path: str | Path, obj: dict) -> None:
    # json uses repr() for floats, which is the shortest exact form
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_operator(path: str | Path, A: OperatorMatrix, seed: Optional[int] = None, **extra) -> None:
    write_json(path, operator_to_dict(A, seed, **extra))


def read_operator(path: str | Path) -> OperatorMatrix:
    return operator_from_dict(read_json(path))


def state_to_dict(psi: FourierState, seed: Optional[int] = None) -> dict:
    return {"n_max": psi.n_max, "seed": seed,
            "re": [float(v) for v in psi.coeffs.real],
            "im": [float(v) for v in psi.coeffs.imag]}


def state_from_dict(d: dict) -> FourierState:
    c = np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
    return FourierState(int(d["n_max"]), c)


def read_state(path: str | Path) -> FourierState:
    """State from JSON ``{n_max, re, im}`` or a CSV with columns ``n, re, im``."""
    p = Path(path)
    if p.suffix == ".json":
        return state_from_dict(read_json(p))
    with open(p, newline="") as fh:
        rows = [r for r in csv.reader(l for l in fh if not l.startswith("#")) if r]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    coeffs = {int(r[0]): float(r[1]) + 1j * (float(r[2]) if len(r) > 2 else 0.0) for r in rows}
    return FourierState.from_dict(coeffs)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True
