"""Command-line front end: kernels, geodesics, coefficients and verification suites.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 singular time, 4 singular D.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import hamiltonics as ham
from . import kernels as ker
from .errors import DomainError, NonCommuting, NotPositiveDefinite, SingularD, SingularTime
from .riccati import coefficients
from .spectral import OperatorSpec
from .verify import SUITES

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_SINGULAR_TIME = 3
EXIT_SINGULAR_D = 4
FORMATS = ("csv", "json")


class ConfigError(Exception):
    pass


def fmt(v) -> str:
    return "%.17g" % v


def _vector(raw, n, name):
    if raw is None:
        return [0.0] * n
    try:
        vals = [float(v) for v in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a list of numbers") from exc
    if len(vals) != n:
        raise ConfigError(f"{name} has {len(vals)} entries, expected {n}")
    return vals


@dataclass
class RunConfig:
    """Parsed configuration document.

    ``A`` and ``B`` are stored row-major as flat lists of n*n numbers.
    """

    n: int
    A: list
    B: list
    f: list = field(default_factory=list)
    g: list = field(default_factory=list)
    h: float = 0.0
    task: dict = field(default_factory=dict)
    format: str = "csv"
    path: str | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        op = doc.get("operator")
        if not isinstance(op, dict):
            raise ConfigError("missing 'operator' block")
        try:
            n = int(op["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("operator.n must be a positive integer") from exc
        if n < 1:
            raise ConfigError("operator.n must be a positive integer")
        A = _flat_matrix(op.get("A"), n, "A")
        B = _flat_matrix(op.get("B"), n, "B")
        out = doc.get("output", {}) or {}
        fmt_ = out.get("format", "csv")
        if fmt_ not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}")
        task = doc.get("task", {}) or {}
        if not isinstance(task, dict):
            raise ConfigError("task must be an object")
        try:
            h = float(op.get("h", 0.0))
        except (TypeError, ValueError) as exc:
            raise ConfigError("operator.h must be a number") from exc
        return cls(
            n=n,
            A=A,
            B=B,
            f=_vector(op.get("f"), n, "f"),
            g=_vector(op.get("g"), n, "g"),
            h=h,
            task=task,
            format=fmt_,
            path=out.get("path"),
        )

    def to_dict(self) -> dict:
        return {
            "operator": {"n": self.n, "A": list(self.A), "B": list(self.B), "f": list(self.f), "g": list(self.g), "h": self.h},
            "task": self.task,
            "output": {"format": self.format, "path": self.path},
        }

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def emit(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def operator(self) -> OperatorSpec:
        n = self.n
        try:
            return OperatorSpec(
                np.array(self.A, dtype=float).reshape(n, n),
                np.array(self.B, dtype=float).reshape(n, n),
                np.array(self.f, dtype=float),
                np.array(self.g, dtype=float),
                self.h,
            )
        except (NotPositiveDefinite, NonCommuting, DomainError) as exc:
            raise ConfigError(str(exc)) from exc


def _flat_matrix(raw, n, name):
    if raw is None:
        raise ConfigError(f"operator.{name} is required")
    arr = np.asarray(raw, dtype=object)
    flat = arr.ravel().tolist() if arr.ndim == 2 else list(raw) if isinstance(raw, list) else None
    if flat is None or len(flat) != n * n:
        raise ConfigError(f"operator.{name} must hold {n * n} entries")
    try:
        return [float(v) for v in flat]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"operator.{name} entries must be numbers") from exc


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def thread_count() -> int:
    raw = os.environ.get("MEHLER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _grid_points(task, n):
    if "points" in task:
        pts = np.asarray(task["points"], dtype=float).reshape(-1, n)
        return pts
    grid = task.get("grid")
    if not isinstance(grid, dict):
        raise ConfigError("kernel task needs 'points' or a 'grid' block")
    lo = _vector(grid.get("lo"), n, "grid.lo")
    hi = _vector(grid.get("hi"), n, "grid.hi")
    num = grid.get("points", 2)
    num = [int(num)] * n if not isinstance(num, list) else [int(v) for v in num]
    if len(num) != n or min(num) < 2:
        raise ConfigError("grid.points must be >= 2 per axis")
    axes = [np.linspace(lo[i], hi[i], num[i]) for i in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _times(task, key="times"):
    raw = task.get(key)
    if raw is None and "t" in task:
        raw = task["t"]
    if isinstance(raw, (int, float)):
        raw = [raw]
    if not raw:
        raise ConfigError(f"task.{key} must list at least one time")
    try:
        ts = [float(v) for v in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"task.{key} entries must be numbers") from exc
    if any(not t > 0.0 for t in ts):
        raise ConfigError("times must be positive")
    return ts


def cmd_kernel(cfg: RunConfig) -> str:
    spec = cfg.operator()
    n = spec.n
    pts = _grid_points(cfg.task, n)
    x0 = np.asarray(_vector(cfg.task.get("x0"), n, "x0"))
    ts = _times(cfg.task)

    def evaluate(t):
        if spec.has_lower_order:
            return np.atleast_1d(ker.kernel_L(spec, pts, x0, t))
        return np.atleast_1d(ker.kernel_LS(spec, pts, x0, t))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        blocks = list(pool.map(evaluate, ts))
    header = [f"x_{i + 1}" for i in range(n)] + ["t", "re", "im"]
    rows = []
    for t, vals in zip(ts, blocks):
        for p, v in zip(pts, vals):
            v = complex(v)
            rows.append(list(p) + [t, v.real, v.imag])
    return _table(cfg.format, header, rows)


def cmd_geodesic(cfg: RunConfig) -> str:
    spec = cfg.operator()
    n = spec.n
    task = cfg.task
    bd = ham.BoundaryData(_vector(task.get("x0"), n, "x0"), _vector(task.get("x1"), n, "x1"), _times(task, "t")[0])
    m = int(task.get("samples", 11))
    if m < 2:
        raise ConfigError("samples must be >= 2")
    gs = ham.solve_geodesic(spec, bd)
    s = np.linspace(0.0, bd.t, m)
    X = ham.eval_geodesic(gs, s)
    E = ham.energy(spec, bd)
    S = ham.action(spec, bd)
    header = ["s"] + [f"x_{i + 1}" for i in range(n)]
    rows = [[si] + list(xi) for si, xi in zip(s, X)]
    if cfg.format == "json":
        return _json({"columns": header, "rows": rows, "E": E, "S": S})
    return _table("csv", header, rows) + f"# E={fmt(E)}\n# S={fmt(S)}\n"


def cmd_riccati(cfg: RunConfig) -> str:
    spec = cfg.operator()
    ts = _times(cfg.task)
    records = [coefficients(spec, t).as_dict() for t in ts]
    if cfg.format == "csv":
        keys = list(records[0])
        header = []
        for k in keys:
            v = records[0][k]
            header += [f"{k}_{i}" for i in range(len(v))] if isinstance(v, list) else [k]
        rows = []
        for r in records:
            row = []
            for k in keys:
                row += r[k] if isinstance(r[k], list) else [r[k]]
            rows.append(row)
        return _table("csv", header, rows)
    return _json({"n": spec.n, "coefficients": records})


def _table(fmt_, header, rows) -> str:
    if fmt_ == "json":
        return _json({"columns": header, "rows": rows})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    # shortest repr of a double round-trips exactly
    return json.dumps(_plain(obj), indent=2) + "\n"


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def cmd_verify(task: dict, seed: int) -> tuple:
    names = task.get("suites") or list(SUITES)
    if isinstance(names, str):
        names = [names]
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suite(s): {', '.join(map(str, bad))}; available: {', '.join(SUITES)}")
    reports = [SUITES[name](seed) for name in names]
    ok = all(r.passed for r in reports)
    doc = {"seed": seed, "pass": ok, "suites": [r.to_dict() for r in reports]}
    return _json(doc), ok


def examples_text(fmt_) -> str:
    """The three classical special cases at fixed sample points."""
    one = np.eye(1)
    rows = [
        ["gaussian", "A=1 B=0 x=1 x0=0 t=0.25", float(ker.kernel_gaussian(one, [1.0], [0.0], 0.25))],
        ["mehler", "a=1 b=1 x=0 x0=0 t=0.5", float(ker.kernel_mehler([1.0], [1.0], [0.0], [0.0], 0.5))],
        ["ornstein_uhlenbeck", "A=1 B=1 x=0 x0=0 t=0.5", float(ker.kernel_ou(one, one, [0.0], [0.0], 0.5))],
    ]
    if fmt_ == "json":
        return _json([{"example": r[0], "inputs": r[1], "value": r[2]} for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["example", "inputs", "value"])
    for r in rows:
        w.writerow([r[0], r[1], fmt(r[2])])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mehler", description="Closed-form heat kernels for quadratic Schrodinger operators.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("kernel", "evaluate the heat kernel on a grid"),
        ("geodesic", "sample the geodesic between two points"),
        ("riccati", "print ansatz coefficients at given times"),
        ("verify", "run verification suites"),
        ("examples", "print the Gaussian, Mehler and Ornstein-Uhlenbeck examples"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", help="output path (default: stdout or output.path)")
        sp.add_argument("--seed", type=int, default=None, help="random seed for verification suites")
        sp.add_argument("--format", choices=FORMATS, default=None)
        if name == "verify":
            sp.add_argument("--suite", action="append", help="suite name (repeatable); default all")
    return p


def _load_config(path):
    if path is None:
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def run(args) -> int:
    doc = _load_config(args.config)
    out_path = args.out
    if args.command == "examples":
        fmt_ = args.format or "csv"
        _emit(examples_text(fmt_), out_path)
        return EXIT_OK
    if args.command == "verify":
        task = (doc or {}).get("task", {}) if isinstance(doc, dict) else {}
        if args.suite:
            task = dict(task, suites=args.suite)
        seed = args.seed if args.seed is not None else int(task.get("seed", 42))
        if out_path is None and isinstance(doc, dict):
            out_path = (doc.get("output") or {}).get("path")
        text, ok = cmd_verify(task, seed)
        _emit(text, out_path)
        return EXIT_OK if ok else EXIT_VERIFY_FAILED
    if doc is None:
        raise ConfigError(f"{args.command} needs --config")
    cfg = RunConfig.from_dict(doc)
    if args.format:
        cfg.format = args.format
    out_path = out_path or cfg.path
    handler = {"kernel": cmd_kernel, "geodesic": cmd_geodesic, "riccati": cmd_riccati}[args.command]
    _emit(handler(cfg), out_path)
    return EXIT_OK


def _emit(text, path):
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularTime as exc:
        print(f"singular time: t={fmt(exc.t)} ({exc})", file=sys.stderr)
        return EXIT_SINGULAR_TIME
    except SingularD as exc:
        print(f"singular D: {exc}", file=sys.stderr)
        return EXIT_SINGULAR_D
    except (DomainError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
