"""Command-line front end: ``momidx <command> --config job.json [--out DIR]``.

A job config is a JSON object.  One matrix source is required:

    "measure":  MeasureSpec JSON (see README)
    "toeplitz": {"family": "geometric", "params": [0.5]} or {"coeffs": {"0": [1, 0], ...}}
    "matrix":   path to an explicit-matrix JSON file
    "bundled":  name of a bundled example measure

Outputs go to ``output_dir`` (or ``--out``): ``report.json`` plus per-sequence
CSV files.  Exit status is 0 on success, 2 when every verdict is
Inconclusive, 1 on errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import catalog
from . import indexes as ix
from . import measures as ms
from .errors import ConfigError, MomidxError
from .matrix_source import ExplicitMatrix, MomentOracle, ToeplitzSymbol, matrix_to_json, oracle_for
from .similarity import AffineMap, conjugate_section, gamma_shift_crosscheck

SCHEMA_VERSION = 1
COMMANDS = ("indexes", "szego", "density", "bpe", "map", "transform", "moments")
SOURCES = ("measure", "toeplitz", "matrix", "bundled")
TOP_KEYS = {
    "command", "N", "z0", "z_ref", "grid", "affine", "crosscheck", "degree",
    "tolerances", "output_dir", "override_applicability", "audit", *SOURCES,
}
TOL_KEYS = {"zero_tol", "rel_stall_tol", "window", "rel_tol", "initial_nodes", "max_nodes"}
GRID_KEYS = {"re_range", "im_range", "steps"}


@dataclass
class JobConfig:
    command: str
    source: str
    source_value: object
    N: int
    z0: complex | None = None
    z_ref: complex = 0j
    grid: dict | None = None
    affine: AffineMap | None = None
    crosscheck: bool = False
    degree: int | None = None
    tolerances: dict = field(default_factory=dict)
    output_dir: str = "."
    override_applicability: bool = False
    audit: bool = True
    raw: dict = field(default_factory=dict)

    @property
    def limit_config(self) -> ix.LimitConfig:
        keys = {"zero_tol", "rel_stall_tol", "window"}
        return ix.LimitConfig(**{k: v for k, v in self.tolerances.items() if k in keys})

    @property
    def quad(self) -> ms.QuadratureConfig:
        keys = {"rel_tol", "initial_nodes", "max_nodes"}
        return ms.QuadratureConfig(**{k: v for k, v in self.tolerances.items() if k in keys})


def _complex(value, where) -> complex:
    try:
        if isinstance(value, (int, float)):
            return complex(value)
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise ConfigError(where, f"expected a number or [re, im], got {value!r}") from exc


def _check_keys(obj, allowed, where):
    extra = set(obj) - set(allowed)
    if extra:
        raise ConfigError(f"{where}{sorted(extra)[0]}", "unknown key")


def parse_config(source, command: str | None = None) -> JobConfig:
    """Validate a job config given as a path, '-' for stdin, or an already-loaded dict."""
    if isinstance(source, dict):
        raw = source
    else:
        try:
            text = sys.stdin.read() if str(source) == "-" else Path(source).read_text()
            raw = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    _check_keys(raw, TOP_KEYS, "")

    cmd = raw.get("command", command)
    if command is not None and cmd != command:
        raise ConfigError("command", f"config says {cmd!r} but {command!r} was requested")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")

    present = [k for k in SOURCES if k in raw]
    if len(present) != 1:
        raise ConfigError("measure", f"exactly one of {', '.join(SOURCES)} is required")
    src = present[0]
    if cmd in ("szego", "density", "moments") and src not in ("measure", "bundled"):
        raise ConfigError("measure", f"{cmd} needs a measure")

    if "N" not in raw:
        raise ConfigError("N", "required")
    N = raw["N"]
    if not isinstance(N, int) or N < 1:
        raise ConfigError("N", "must be an integer >= 1")

    tol = dict(raw.get("tolerances", {}))
    _check_keys(tol, TOL_KEYS, "tolerances.")
    for k, v in tol.items():
        if not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"tolerances.{k}", "must be a positive number")

    cfg = JobConfig(cmd, src, raw[src], N, tolerances=tol, raw=raw)
    cfg.output_dir = str(raw.get("output_dir", "."))
    cfg.crosscheck = bool(raw.get("crosscheck", False))
    cfg.override_applicability = bool(raw.get("override_applicability", False))
    cfg.audit = bool(raw.get("audit", True))
    if "z0" in raw:
        cfg.z0 = _complex(raw["z0"], "z0")
    elif cmd == "bpe":
        raise ConfigError("z0", "required for bpe")
    if "z_ref" in raw:
        cfg.z_ref = _complex(raw["z_ref"], "z_ref")
    if "grid" in raw:
        g = raw["grid"]
        _check_keys(g, GRID_KEYS, "grid.")
        for k in GRID_KEYS:
            if k not in g:
                raise ConfigError(f"grid.{k}", "required")
        cfg.grid = g
    elif cmd == "map":
        raise ConfigError("grid", "required for map")
    if "affine" in raw:
        a = raw["affine"]
        _check_keys(a, {"alpha", "beta"}, "affine.")
        try:
            cfg.affine = AffineMap(_complex(a.get("alpha", 1), "affine.alpha"), _complex(a.get("beta", 0), "affine.beta"))
        except ValueError as exc:
            raise ConfigError("affine.alpha", str(exc)) from exc
    elif cmd == "transform":
        raise ConfigError("affine", "required for transform")
    if "degree" in raw:
        if not isinstance(raw["degree"], int) or raw["degree"] < 0:
            raise ConfigError("degree", "must be a nonnegative integer")
        cfg.degree = raw["degree"]
    try:
        cfg.quad, cfg.limit_config
    except ValueError as exc:
        raise ConfigError("tolerances", str(exc)) from exc
    return cfg


def _measure(cfg: JobConfig):
    if cfg.source == "measure":
        try:
            return ms.measure_from_json(cfg.source_value)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("measure", str(exc)) from exc
    if cfg.source == "bundled":
        if cfg.source_value not in catalog.BUNDLED:
            raise ConfigError("bundled", f"unknown; choose from {', '.join(sorted(catalog.BUNDLED))}")
        return catalog.BUNDLED[cfg.source_value]()
    return None


def _oracle(cfg: JobConfig, base_dir: Path):
    m = _measure(cfg)
    if m is not None:
        return oracle_for(m, cfg.quad), m
    if cfg.source == "toeplitz":
        t = cfg.source_value
        if not isinstance(t, dict):
            raise ConfigError("toeplitz", "must be an object")
        try:
            if "family" in t:
                _check_keys(t, {"family", "params"}, "toeplitz.")
                return ToeplitzSymbol.from_density(ms.NamedFamily(t["family"], tuple(t.get("params", ())))), None
            _check_keys(t, {"coeffs"}, "toeplitz.")
            return ToeplitzSymbol({int(n): _complex(c, f"toeplitz.coeffs.{n}") for n, c in t["coeffs"].items()}), None
        except (KeyError, ValueError) as exc:
            raise ConfigError("toeplitz", str(exc)) from exc
    path = Path(cfg.source_value)
    if not path.is_absolute():
        path = base_dir / path
    try:
        return ExplicitMatrix.load(path), None
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError("matrix", str(exc)) from exc


def _estimate(seq, cfg):
    try:
        return asdict(ix.estimate_limit(seq, cfg.limit_config))
    except ix.TooShort as exc:
        return {"value": float(seq.values[-1]) if len(seq.values) else None, "status": "TooShort", "note": str(exc)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


class _Job:
    def __init__(self, cfg: JobConfig, out: Path, base_dir: Path):
        self.cfg = cfg
        self.out = out
        self.base_dir = base_dir
        self.report = {
            "schema_version": SCHEMA_VERSION,
            "tool": "momidx",
            "version": __version__,
            "command": cfg.command,
            "job": cfg.raw,
            "order_requested": cfg.N,
            "estimates": {},
            "verdicts": [],
            "warnings": [],
            "errors": [],
            "files": [],
        }

    def write_seq(self, seq, name):
        seq.write_csv(self.out / name)
        self.report["files"].append(name)

    def reached(self, *seqs):
        self.report["order_reached"] = min(s.order_reached for s in seqs)
        bd = [s.breakdown_order for s in seqs if s.breakdown_order is not None]
        if bd:
            self.report["breakdown_order"] = min(bd)

    # -- commands ---------------------------------------------------------

    def indexes(self, o, m):
        cfg = self.cfg
        sw = ix.factor_sweep(o, cfg.N)
        lam = ix.lambda_sequence(o, cfg.N)
        gam = ix.gamma_sequence(o, cfg.N, "truncate", sw)
        alp = ix.alpha_sequence(o, cfg.N, "truncate", sw)
        seqs = {"lambda": lam, "gamma": gam, "alpha": alp}
        if cfg.z0 is not None:
            seqs["gamma_at"] = ix.gamma_at_sequence(o, cfg.z0, cfg.N, "truncate", sw)
        for name, s in seqs.items():
            self.write_seq(s, f"{name}.csv")
            self.report["estimates"][name] = _estimate(s, cfg)
        self.reached(gam)
        if cfg.audit:
            self.report["audit"] = ix.audit_inequalities(o, cfg.N).to_json()

    def szego(self, o, m):
        v = ix.szego_verdict(m, self.cfg.N, self.cfg.quad, self.cfg.limit_config)
        seq = ix.gamma_sequence(o, self.cfg.N, "truncate")
        self.write_seq(seq, "gamma.csv")
        self.reached(seq)
        self.report["estimates"]["gamma"] = _estimate(seq, self.cfg)
        self.report["verdicts"].append(v.to_json())

    def density(self, o, m):
        cfg = self.cfg
        v = ix.density_verdict(m, cfg.N, cfg.z_ref, cfg.override_applicability, cfg.quad, cfg.limit_config)
        seq = ix.gamma_at_sequence(o, cfg.z_ref, cfg.N, "truncate")
        self.write_seq(seq, "gamma_at.csv")
        self.reached(seq)
        self.report["estimates"]["gamma_at"] = _estimate(seq, cfg)
        self.report["verdicts"].append(v.to_json())

    def bpe(self, o, m):
        cfg = self.cfg
        v = ix.bpe_verdict(o, cfg.z0, cfg.N, cfg.limit_config)
        seq = ix.gamma_at_sequence(o, cfg.z0, cfg.N, "truncate")
        self.write_seq(seq, "gamma_at.csv")
        self.reached(seq)
        self.report["estimates"]["gamma_at"] = _estimate(seq, cfg)
        out = v.to_json()
        if cfg.crosscheck:
            cc = gamma_shift_crosscheck(o, cfg.z0, cfg.N)
            out["crosscheck"] = {"max_rel_gap": cc.max_rel_gap, "schur_from": cc.schur_from}
        self.report["verdicts"].append(out)

    def map(self, o, m):
        g = self.cfg.grid
        gm = ix.bpe_map(o, g["re_range"], g["im_range"], g["steps"], self.cfg.N)
        gm.write_csv(self.out / "gamma_map.csv")
        self.report["files"].append("gamma_map.csv")
        self.report["order_reached"] = gm.order_reached
        self.report["map"] = {
            "shape": list(gm.values.shape),
            "min": float(gm.values.min()),
            "max": float(gm.values.max()),
        }

    def transform(self, o, m):
        cfg = self.cfg
        a = cfg.affine
        S = o.section(cfg.N)
        T = conjugate_section(S, a)
        (self.out / "transformed_matrix.json").write_text(json.dumps(matrix_to_json(T)))
        self.report["files"].append("transformed_matrix.json")
        t_oracle = ExplicitMatrix(T)
        seq = ix.gamma_sequence(t_oracle, cfg.N, "truncate")
        self.write_seq(seq, "gamma.csv")
        self.reached(seq)
        self.report["estimates"]["gamma"] = _estimate(seq, cfg)
        info = {"alpha": a.alpha, "beta": a.beta}
        if m is not None:
            pushed = ms.pushforward(m, a.alpha, a.beta)
            P = MomentOracle(pushed, cfg.quad).section(cfg.N)
            info["pushforward_measure"] = ms.measure_to_json(pushed)
            info["max_abs_diff_vs_pushforward"] = float(np.abs(P - T).max())
        if cfg.z0 is not None:
            cc = gamma_shift_crosscheck(o, cfg.z0, cfg.N)
            info["crosscheck"] = {"z0": cfg.z0, "max_rel_gap": cc.max_rel_gap, "schur_from": cc.schur_from}
        self.report["transform"] = info

    def moments(self, o, m):
        deg = self.cfg.N if self.cfg.degree is None else self.cfg.degree
        M, err = ms.moment_matrix(m, deg, self.cfg.quad)
        doc = matrix_to_json(M)
        doc["error_bounds"] = err.tolist()
        (self.out / "moments.json").write_text(json.dumps(doc))
        self.report["files"].append("moments.json")
        self.report["moments"] = doc
        self.report["order_reached"] = deg

    def run(self):
        o, m = _oracle(self.cfg, self.base_dir)
        getattr(self, self.cfg.command)(o, m)


def run(cfg: JobConfig, out_dir=None, base_dir=None, extra_echo: dict | None = None):
    """Execute a job; returns ``(report, exit_code)`` and writes the output files."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    job = _Job(cfg, out, Path(base_dir or "."))
    if extra_echo:
        job.report["job"] = {**cfg.raw, **extra_echo}
    t0 = time.perf_counter()
    code = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            job.run()
        except (MomidxError, ValueError, ArithmeticError) as exc:
            job.report["errors"].append(f"{type(exc).__name__}: {exc}")
            code = 1
    seen = []
    for w in caught:
        msg = f"{w.category.__name__}: {w.message}"
        if msg not in seen:
            seen.append(msg)
    job.report["warnings"] = seen
    answers = [v["answer"] for v in job.report["verdicts"]]
    if code == 0 and answers and all(a == ix.UNKNOWN for a in answers):
        code = 2
    job.report["exit_code"] = code
    job.report["timing"] = {"seconds": time.perf_counter() - t0}
    report = _jsonable(job.report)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report, code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momidx", description="Matrix indexes of Hermitian moment matrices.")
    p.add_argument("--version", action="version", version=f"momidx {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="job config JSON file, or - for stdin")
    p.add_argument("--out", help="output directory (overrides output_dir in the config)")
    p.add_argument("--max-order", type=int, help="cap on the maximal order N")
    p.add_argument("--seed", type=int, help="recorded in the report; computations are deterministic")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, args.command)
    except ConfigError as exc:
        print(f"momidx: config error: {exc}", file=sys.stderr)
        return 1
    echo = {}
    if args.max_order is not None:
        if args.max_order < 1:
            print("momidx: --max-order must be >= 1", file=sys.stderr)
            return 1
        echo["max_order"] = args.max_order
        cfg = replace(cfg, N=min(cfg.N, args.max_order))
    if args.seed is not None:
        echo["seed"] = args.seed
    base = Path(args.config).parent if args.config != "-" else Path(".")
    report, code = run(cfg, args.out, base, echo)
    summary = report["verdicts"] or report["estimates"]
    print(json.dumps({"exit_code": code, "order_reached": report.get("order_reached"), "summary": summary}, sort_keys=True))
    for e in report["errors"]:
        print(f"momidx: {e}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
