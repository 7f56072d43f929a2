"""Command-line driver: JSON run configuration in, key=value or CSV out.

Exit status is 0 on success, 2 when the configuration or parameters are
invalid and 3 when a numeric stage fails.  Failures print a one-line JSON
error document on stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidParameters, NLSDualError, NotDegenerate
from .families import SolutionDescriptor, construct_solution, evaluate_field
from .figures import DEFAULT_FIGURE_GRID, figure_data
from .params import DerivedCoefficients, ProblemParams, derive_coefficients
from .quartic import DEFAULT_CLUSTER_TOL, QuarticPoly, RootClassification, build_quartic, classify_roots, find_roots
from .verify import Grid, ode_identity_residual, pde_residual

MODES = ("derive", "roots", "solve", "eval", "verify", "figure")
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
FIELD_HEADER = ("x", "y", "t", "re_q", "im_q", "abs_q")
SLICE_HEADER = ("x", "y", "re_q", "im_q", "abs_q")
_VALIDATION_ERRORS = (ConfigError, InvalidParameters, NotDegenerate)


@dataclass(frozen=True)
class Options:
    reduced: bool = False
    eta0: float = 0.0
    branch_sign: int = 1
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    stencil_order: int = 4
    fd_step: float = 1e-2


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: ProblemParams | None = None
    grid: Grid | None = None
    options: Options = field(default_factory=Options)
    figure_id: int | None = None
    output_path: str | None = None


def _strict(cls, data, what):
    if not isinstance(data, dict):
        raise ConfigError(f"{what} must be an object")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) in {what}: {', '.join(unknown)}")
    return data


def _typed(value, kind, name):
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be a boolean")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"{name} must be an integer")
        return int(value)
    return float(value)


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON document; every unknown key is an error."""
    _strict(RunConfig, data, "config")
    mode = data.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")

    params = None
    if "params" in data and data["params"] is not None:
        raw = _strict(ProblemParams, data["params"], "params")
        missing = sorted({f.name for f in fields(ProblemParams)} - set(raw))
        if missing:
            raise ConfigError(f"missing params: {', '.join(missing)}")
        params = ProblemParams(**{k: _typed(v, float, f"params.{k}") for k, v in raw.items()})
    elif mode != "figure":
        raise ConfigError(f"params are required in mode {mode!r}")

    grid = None
    if data.get("grid") is not None:
        raw = _strict(Grid, data["grid"], "grid")
        missing = sorted({f.name for f in fields(Grid)} - set(raw))
        if missing:
            raise ConfigError(f"missing grid fields: {', '.join(missing)}")
        kinds = {f.name: (int if f.name.startswith("n") else float) for f in fields(Grid)}
        grid = Grid(**{k: _typed(v, kinds[k], f"grid.{k}") for k, v in raw.items()})
    if mode in ("eval", "verify") and grid is None:
        raise ConfigError(f"mode {mode!r} needs a grid")
    if grid is not None and min(grid.nx, grid.ny, grid.nt) < 2:
        raise ConfigError("grid counts must be at least 2")

    raw = _strict(Options, data.get("options") or {}, "options")
    defaults = Options()
    opts = Options(**{k: _typed(v, type(getattr(defaults, k)), f"options.{k}") for k, v in raw.items()})
    if opts.branch_sign not in (1, -1):
        raise ConfigError("options.branch_sign must be +1 or -1")
    if opts.stencil_order not in (2, 4):
        raise ConfigError("options.stencil_order must be 2 or 4")
    if not (opts.fd_step > 0 and opts.cluster_tol > 0):
        raise ConfigError("options.fd_step and options.cluster_tol must be positive")

    fig = data.get("figure_id")
    if mode == "figure":
        if fig is None:
            raise ConfigError("figure_id is required in figure mode")
        fig = _typed(fig, int, "figure_id")
        if not 1 <= fig <= 6:
            raise ConfigError("figure_id must be in 1..6")
    elif fig is not None:
        raise ConfigError("figure_id is only allowed in figure mode")

    out = data.get("output_path")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_path must be a string")
    return RunConfig(mode=mode, params=params, grid=grid, options=opts, figure_id=fig, output_path=out)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


# --- formatting ---------------------------------------------------------------

def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, (tuple, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, out)
    elif isinstance(value, complex):
        out.append((f"{prefix}.re", fmt(value.real)))
        out.append((f"{prefix}.im", fmt(value.imag)))
    elif isinstance(value, bool) or value is None:
        out.append((prefix, str(value).lower() if value is not None else "none"))
    elif isinstance(value, (int, float, np.floating, np.integer)):
        out.append((prefix, fmt(value)))
    else:
        out.append((prefix, str(value)))
    return out


def key_values(doc: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in _flatten("", doc, []))


def derived_document(d: DerivedCoefficients) -> dict:
    return d.to_dict()


def roots_document(q: QuarticPoly, cls: RootClassification) -> dict:
    return {
        "quartic": {"c4": 1.0, "c3": q.c3, "c2": q.c2, "c1": q.c1, "c0": q.c0},
        "roots": [complex(r) for r in cls.roots_raw],
        "pattern": cls.pattern.name,
        "clusters": list(cls.roots),
        "multiplicities": list(cls.pattern.value),
    }


def descriptor_document(desc: SolutionDescriptor) -> dict:
    doc = {f.name: getattr(desc, f.name) for f in fields(desc)}
    doc["family"] = desc.family.name
    return doc


def field_csv(axes, q) -> str:
    """Rows x -> y -> t (t fastest), header ``x,y,t,re_q,im_q,abs_q``."""
    xs, ys, ts = axes
    X, Y, T = np.meshgrid(xs, ys, ts, indexing="ij")
    return _csv(FIELD_HEADER, (X.ravel(), Y.ravel(), T.ravel()), q.ravel())


def slice_csv(xs, ys, q2) -> str:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return _csv(SLICE_HEADER, (X.ravel(), Y.ravel()), q2.ravel())


def _csv(header, coords, q):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*coords, q.real, q.imag, np.abs(q)):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_field_csv(path):
    """Inverse of :func:`field_csv`: returns ``(axes, q)`` with ``q[ix, iy, it]``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs, ys, ts = (np.unique(data[:, i]) for i in range(3))
    q = (data[:, 3] + 1j * data[:, 4]).reshape(xs.size, ys.size, ts.size)
    return (xs, ys, ts), q


def sampled_residual(axes, q, m: float, k: float) -> float:
    """Sup-norm of the second-order residual computed from grid samples alone.

    Used to check that an exported field carries the same information as
    the in-memory one.  Requires uniform spacing and at least 3 points per axis.
    """
    xs, ys, ts = axes
    hx, hy, ht = xs[1] - xs[0], ys[1] - ys[0], ts[1] - ts[0]
    c = q[1:-1, 1:-1, 1:-1]
    qxx = (q[2:, 1:-1, 1:-1] - 2 * c + q[:-2, 1:-1, 1:-1]) / hx**2
    qyy = (q[1:-1, 2:, 1:-1] - 2 * c + q[1:-1, :-2, 1:-1]) / hy**2
    qt = (q[1:-1, 1:-1, 2:] - q[1:-1, 1:-1, :-2]) / (2 * ht)
    a = (c * np.conj(c)).real ** m
    r = 1j * qt + 0.5 * (qxx + qyy) + (a + k * a * a) * c
    return float(np.max(np.abs(r)))


# --- pipeline ------------------------------------------------------------------

def solve_pipeline(params: ProblemParams, opts: Options):
    derived = derive_coefficients(params)
    quartic = build_quartic(params, derived)
    cls = classify_roots(find_roots(quartic), tol=opts.cluster_tol, poly=quartic)
    desc = construct_solution(cls, params, derived, reduced=opts.reduced,
                              eta0=opts.eta0, branch_sign=opts.branch_sign)
    return derived, quartic, cls, desc


def _emit(text: str, path, stdout):
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text)


def run(config: RunConfig, stdout=None) -> int:
    """Execute one run; raises package errors for the caller to map to exit codes."""
    stdout = stdout or sys.stdout
    opts = config.options
    mode = config.mode
    if mode == "figure":
        axes, q, plane = figure_data(config.figure_id, config.grid or DEFAULT_FIGURE_GRID)
        out = Path(config.output_path or f"figure{config.figure_id}.csv")
        slice_path = out.with_name(f"{out.stem}_t1{out.suffix or '.csv'}")
        out.write_text(field_csv(axes, q))
        slice_path.write_text(slice_csv(axes[0], axes[1], plane))
        stdout.write(key_values({"surface": str(out), "slice": str(slice_path),
                                 "figure_id": config.figure_id}))
        return EXIT_OK

    params = config.params
    if mode == "derive":
        _emit(key_values(derived_document(derive_coefficients(params))), config.output_path, stdout)
        return EXIT_OK
    if mode == "roots":
        derived = derive_coefficients(params)
        quartic = build_quartic(params, derived)
        cls = classify_roots(find_roots(quartic), tol=opts.cluster_tol, poly=quartic)
        _emit(key_values(roots_document(quartic, cls)), config.output_path, stdout)
        return EXIT_OK

    derived, quartic, cls, desc = solve_pipeline(params, opts)
    if mode == "solve":
        _emit(key_values(descriptor_document(desc)), config.output_path, stdout)
    elif mode == "eval":
        X, Y, T = config.grid.mesh()
        q = evaluate_field(desc, X, Y, T)
        _emit(field_csv(config.grid.axes(), q), config.output_path, stdout)
    elif mode == "verify":
        rep = pde_residual(desc, config.grid, opts.fd_step, opts.stencil_order)
        doc = rep.to_dict()
        doc["family"] = desc.family.name
        doc["identity_residual"] = ode_identity_residual(params, derived, np.linspace(-2, 2, 41))
        _emit(key_values(doc), config.output_path, stdout)
    return EXIT_OK


def error_document(exc: BaseException) -> dict:
    status = EXIT_INVALID if isinstance(exc, _VALIDATION_ERRORS) else EXIT_NUMERIC
    return {
        "error": type(exc).__name__,
        "module": getattr(exc, "module", "cli"),
        "message": str(exc),
        "exit_status": status,
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlsdual", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output file (overrides output_path)")
    p.add_argument("--cluster-tol", type=float)
    p.add_argument("--fd-step", type=float)
    p.add_argument("--stencil-order", type=int, choices=(2, 4))
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        data = load_config(args.config)
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        data["mode"] = args.mode  # the subcommand wins over a mode stored in the file
        opts = dict(data.get("options") or {})
        for flag, key in (("cluster_tol", "cluster_tol"), ("fd_step", "fd_step"), ("stencil_order", "stencil_order")):
            if getattr(args, flag) is not None:
                opts[key] = getattr(args, flag)
        if opts:
            data["options"] = opts
        if args.out is not None:
            data["output_path"] = args.out
        return run(parse_config(data), stdout)
    except NLSDualError as exc:
        doc = error_document(exc)
    except (ValueError, ArithmeticError) as exc:
        doc = error_document(exc)
    stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    return doc["exit_status"]
