"""Command-line driver: ``cylq {transform,quantize,wigner,portrait,verify}``.

Exit codes: 0 pass, 1 a check failed, 2 configuration error, 3 I/O error.
Settings come from flags or from ``--config FILE`` (``key=value`` lines or a
JSON object); flags win over the file. ``CYLQ_THREADS`` caps the worker
threads used by ``verify``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .core import (AngleGrid, CircleSamples, ClassicalObservable, CylqError, FourierState,
                   OperatorMatrix, PhasePoint)
from .fiducials import FiducialKind, make_fiducial
from .fourier import min_grid_size
from .gabor import gabor_reconstruct, gabor_transform, isometry_defect
from .portrait import NonDensityWarning, portrait, portrait_of_operator
from .quantize import (QuantizationContext, build_M, parity_weight, quantize,
                       weight_from_state, weight_from_table)
from .wigner import (imaginary_residue, wigner_from_gabor, wigner_half_integer,
                     wigner_table)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

DEFAULTS = {
    "n_max": 16, "m_max": 48, "grid_size": None, "fiducial": "vonmises:2",
    "weight": "parity", "state": "random", "observable": "m", "seed": 0,
    "out": None, "format": "csv", "tolerance_scale": 1.0,
}


class ConfigError(Exception):
    pass


def _coerce(key: str, val):
    if val is None:
        return None
    if key in ("n_max", "m_max", "grid_size", "seed"):
        try:
            return int(val)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {val!r}")
    if key == "tolerance_scale":
        return float(val)
    return str(val)


def load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad JSON in {path}: {e}")
    else:
        raw = {}
        for i, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{i}: expected key=value")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip()
    out = {}
    for k, v in raw.items():
        k = k.replace("-", "_")
        if k not in DEFAULTS:
            raise ConfigError(f"unknown config key {k!r}")
        out[k] = _coerce(k, v)
    return out


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config_file(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = _coerce(k, v)
    n, m = cfg["n_max"], cfg["m_max"]
    if n < 1 or m < 0:
        raise ConfigError("n_max must be >= 1 and m_max >= 0")
    k_min = min_grid_size(n, m)
    if cfg["grid_size"] is None:
        cfg["grid_size"] = k_min
    if cfg["grid_size"] < k_min:
        raise ConfigError(f"grid_size={cfg['grid_size']} violates the grid rule "
                          f"K >= 2(2N+M)+1; minimum K is {k_min}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    return cfg


# ---------------------------------------------------------------- specs

def parse_fiducial(spec: str) -> FiducialKind:
    try:
        return FiducialKind.parse(spec)
    except (ValueError, CylqError) as e:
        raise ConfigError(f"bad fiducial {spec!r}: {e}")


def make_state(spec: str, n_max: int, seed: int) -> FourierState:
    """``random`` | ``superposition:0,1`` | ``file:PATH`` | a fiducial spec."""
    if spec == "random":
        return FourierState.random(n_max, np.random.default_rng(seed))
    if spec.startswith("superposition:"):
        idx = [int(t) for t in spec.split(":", 1)[1].split(",")]
        c = np.zeros(2 * n_max + 1, dtype=complex)
        for i in idx:
            if abs(i) > n_max:
                raise ConfigError(f"basis index {i} outside n_max={n_max}")
            c[i + n_max] += 1.0
        return FourierState.normalized(n_max, c)
    if spec.startswith("file:"):
        return io.read_state(spec[5:]).truncated(n_max)
    kind = parse_fiducial(spec)
    try:
        return make_fiducial(kind, n_max)
    except CylqError as e:
        raise ConfigError(str(e))


def make_weight(spec: str, cfg: dict):
    if spec == "parity":
        return parity_weight()
    if spec.startswith("coherent:"):
        fid = parse_fiducial(spec.split(":", 1)[1])
        try:
            return weight_from_state(make_fiducial(fid, cfg["n_max"]))
        except CylqError as e:
            raise ConfigError(str(e))
    if spec.startswith("table:"):
        _, ms, grid, vals = io.read_table_csv(spec[6:])
        return weight_from_table(vals, grid, name=spec)
    raise ConfigError(f"unknown weight {spec!r} (parity | coherent:<fiducial> | table:<csv>)")


def sawtooth_samples(grid: AngleGrid, band: int) -> CircleSamples:
    """Band-limited projection of the periodized angle ``γ`` on ``(-π, π)``:
    ``ĥ_j = i(-1)^j / j``."""
    j = np.arange(1, band + 1)
    coef = 1j * (-1.0) ** j / j
    th = grid.points
    vals = 2 * np.real(np.exp(1j * np.outer(th, j)) @ coef)
    return CircleSamples(grid, vals.astype(complex))


def make_observable(spec: str, cfg: dict, grid: AngleGrid) -> ClassicalObservable:
    M = cfg["m_max"]
    if spec == "m":
        return ClassicalObservable.momentum_only(lambda m: m, M)
    if spec == "m^2":
        return ClassicalObservable.momentum_only(lambda m: m * m, M)
    if spec == "cos":
        return ClassicalObservable.angle_only(CircleSamples(grid, np.cos(grid.points)), M)
    if spec == "sin":
        return ClassicalObservable.angle_only(CircleSamples(grid, np.sin(grid.points)), M)
    if spec == "per-angle":
        return ClassicalObservable.angle_only(sawtooth_samples(grid, 2 * cfg["n_max"]), M)
    if spec == "one":
        return ClassicalObservable.angle_only(CircleSamples(grid, np.ones(grid.size)), M)
    if spec.startswith("coeffs:"):
        vals = [complex(t) for t in spec[7:].split(",")]
        if len(vals) % 2 == 0:
            raise ConfigError("coefficient list must have odd length (m = -k..k)")
        k = len(vals) // 2
        return ClassicalObservable.momentum_only(lambda m, v=vals, k=k: v[m + k], k)
    if spec.startswith("table:"):
        _, ms, tgrid, vals = io.read_table_csv(spec[6:])
        return ClassicalObservable.general(vals, tgrid)
    raise ConfigError(f"unknown observable {spec!r}")


def _out_path(cfg: dict, default: str) -> Path:
    return Path(cfg["out"] or default)


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=1, sort_keys=True, default=float))


# ---------------------------------------------------------------- commands

def cmd_transform(cfg: dict) -> int:
    grid = AngleGrid(cfg["grid_size"])
    phi = make_state(cfg["fiducial"], cfg["n_max"], cfg["seed"])
    psi = make_state(cfg["state"], cfg["n_max"], cfg["seed"])
    t = gabor_transform(phi, psi, cfg["m_max"], grid)
    rec = gabor_reconstruct(phi, t)
    defect = isometry_defect(phi, psi, t)
    err = (rec - psi).norm()
    tol = 1e-8 * cfg["tolerance_scale"]
    out = _out_path(cfg, f"gabor.{cfg['format']}")
    if cfg["format"] == "csv":
        io.write_table_csv(out, t.momenta, grid, t.values, "transform", cfg["seed"],
                           extra={"fiducial": cfg["fiducial"], "state": cfg["state"]})
    else:
        io.write_json(out, {"m_max": t.m_max, "grid_size": grid.size, "seed": cfg["seed"],
                            "re": t.values.real.tolist(), "im": t.values.imag.tolist()})
    ok = defect <= tol and err <= tol
    _emit({"command": "transform", "output": str(out), "isometry_defect": defect,
           "reconstruction_error": err, "tolerance": tol, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def _closed_form_report(spec: str, A: OperatorMatrix, weight, cfg: dict) -> list[dict]:
    n = cfg["n_max"]
    L = np.arange(-n, n + 1).astype(float)
    tol = 1e-8 * cfg["tolerance_scale"]
    rows = []

    def add(name, ref, gating=True):
        err = float(np.max(np.abs(A.entries - ref)))
        rows.append({"closed_form": name, "error": err, "tolerance": tol,
                     "pass": err <= tol, "gating": gating})

    psi = weight.state
    mu, mu2 = psi.moments() if psi is not None else (0.0, 0.0)
    if spec == "m":
        if psi is None:
            add("diag(n)", np.diag(L))
        else:
            add("L - <m>", np.diag(L - mu))
            add("L + <m> (as stated)", np.diag(L + mu), gating=False)
    elif spec == "m^2":
        if psi is None:
            add("diag(n^2)", np.diag(L * L))
        else:
            add("L^2 - 2<m>L + <m^2>", np.diag(L * L - 2 * mu * L + mu2))
            add("L^2 + 2<m>L + <m^2> (as stated)", np.diag(L * L + 2 * mu * L + mu2), gating=False)
    elif spec == "per-angle":
        j = L[:, None] - L[None, :]
        jj = j.astype(int)
        hj = np.where(jj == 0, 0.0, 1j * (-1.0) ** jj / np.where(jj == 0, 1, jj))
        damp = np.array([[complex(weight(int(d), np.array([0.0]))[0]) for d in row] for row in jj])
        add("h(k-k') w(k-k', 0)", hj * damp)
    elif spec in ("cos", "sin") and psi is None:
        T = np.eye(2 * n + 1, k=-1)
        add("Toeplitz multiplication", 0.5 * (T + T.T) if spec == "cos" else (T - T.T) / 2j)
    return rows


def cmd_quantize(cfg: dict) -> int:
    grid = AngleGrid(cfg["grid_size"])
    weight = make_weight(cfg["weight"], cfg)
    f = make_observable(cfg["observable"], cfg, grid)
    ctx = QuantizationContext.create(weight, cfg["n_max"], cfg["m_max"], grid)
    A = quantize(f, ctx)
    report = _closed_form_report(cfg["observable"], A, weight, cfg)
    extra = {"weight": cfg["weight"], "observable": cfg["observable"], "report": report}
    if cfg["observable"] == "per-angle":
        # w(j, 0) for j = 0..2N, the factors damping the j-th Fourier mode
        extra["damping"] = [complex(weight(j, np.array([0.0]))[0]).real
                            for j in range(0, 2 * cfg["n_max"] + 1)]
    out = _out_path(cfg, "operator.json")
    io.write_operator(out, A, cfg["seed"], **extra)
    ok = all(r["pass"] for r in report if r["gating"])
    _emit({"command": "quantize", "output": str(out), "report": report,
           **({"damping": extra["damping"]} if "damping" in extra else {}), "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_wigner(cfg: dict) -> int:
    grid = AngleGrid(cfg["grid_size"])
    psi = make_state(cfg["state"], cfg["n_max"], cfg["seed"])
    m_max = max(cfg["m_max"], psi.n_max)
    resid = imaginary_residue(psi, m_max, grid)
    t = wigner_table(psi, m_max, grid)
    tg = wigner_from_gabor(psi, m_max, grid)
    half = wigner_half_integer(psi, m_max, grid)
    norm = t.normalization()
    agree = float(np.max(np.abs(t.values - tg.values)))
    out = _out_path(cfg, "wigner.csv")
    io.write_table_csv(out, t.momenta, grid, t.values, "wigner", cfg["seed"],
                       complex_values=False, extra={"state": cfg["state"]})
    half_out = out.with_name(out.stem + "_half" + out.suffix)
    io.write_table_csv(half_out, half.momenta, grid, half.values, "wigner-half", cfg["seed"],
                       complex_values=False, extra={"state": cfg["state"]})
    neg = int(np.sum(half.values < -1e-12))
    tol = cfg["tolerance_scale"]
    ok = abs(norm - 1) <= 1e-10 * tol and agree <= 1e-7 * tol and resid <= 1e-12 * tol
    _emit({"command": "wigner", "output": str(out), "half_integer_output": str(half_out),
           "normalization": norm, "max_imaginary_residue": resid, "route_agreement": agree,
           "half_integer_negative_cells": neg, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_portrait(cfg: dict) -> int:
    grid = AngleGrid(cfg["grid_size"])
    weight = make_weight(cfg["weight"], cfg)
    f = make_observable(cfg["observable"], cfg, grid)
    rows = min(8, cfg["m_max"])
    budget = min(cfg["m_max"], weight.m_max)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonDensityWarning)
        P = portrait(f, weight, rows, grid, m_budget=budget)
        one = portrait(ClassicalObservable.angle_only(CircleSamples(grid, np.ones(grid.size))),
                       weight, rows, grid, m_budget=budget)
    density = not any(issubclass(w.category, NonDensityWarning) for w in caught)
    mass = float(np.max(np.abs(one.values - 1.0)))
    # trace route at a few lattice points, on a band wide enough for them
    ctx = QuantizationContext.create(weight, cfg["n_max"], cfg["m_max"], grid)
    A = quantize(f, ctx)
    M = build_M(weight, cfg["n_max"])
    pts = [(m, k) for m in (-1, 0, 1) for k in (0, grid.size // 3)]
    route = max(abs(portrait_of_operator(A, weight, PhasePoint(m, grid.points[k]), M)
                    - P.values[m + rows, k]) for m, k in pts)
    out = _out_path(cfg, "portrait.csv")
    io.write_table_csv(out, P.momenta, grid, P.values, "portrait", cfg["seed"],
                       extra={"weight": cfg["weight"], "observable": cfg["observable"]})
    tol = cfg["tolerance_scale"]
    ok = mass <= 1e-9 * tol
    _emit({"command": "portrait", "output": str(out), "density_weight": density,
           "unit_portrait_error": mass, "trace_route_difference": route, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: dict) -> int:
    from .verify import VerifyConfig, run

    threads = int(os.environ.get("CYLQ_THREADS", "1") or 1)
    fid = cfg["fiducial"]
    vc = VerifyConfig(n_max=cfg["n_max"], m_max=cfg["m_max"], grid_size=cfg["grid_size"],
                      fiducial=fid, seed=cfg["seed"], tolerance_scale=cfg["tolerance_scale"],
                      threads=max(1, threads))
    report = run(vc)
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


COMMANDS = {"transform": cmd_transform, "quantize": cmd_quantize, "wigner": cmd_wigner,
            "portrait": cmd_portrait, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cylq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value or JSON file")
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--m-max", dest="m_max", type=int)
        p.add_argument("--grid-size", dest="grid_size", type=int)
        p.add_argument("--fiducial", help="e.g. vonmises:2, gaussian:1, dirichlet:4, basis:0")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output file")
        p.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                       help="multiply every tolerance (tiny values force failures)")
        if name in ("transform", "wigner"):
            p.add_argument("--state", help="random | superposition:0,1 | file:PATH | fiducial spec")
        if name == "transform":
            p.add_argument("--format", choices=["csv", "json"])
        if name in ("quantize", "portrait"):
            p.add_argument("--weight", help="parity | coherent:<fiducial> | table:<csv>")
            p.add_argument("--observable",
                           help="m | m^2 | cos | sin | per-angle | one | coeffs:a,b,c | table:<csv>")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"cylq: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"cylq: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except CylqError as e:
        print(f"cylq: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
