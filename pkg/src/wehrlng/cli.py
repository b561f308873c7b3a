"""Command-line front end.

Every value written here comes from :mod:`wehrlng.suites`; this module only parses
options, writes CSV files in grid order and records a run manifest.

Exit status: 0 on success, 1 on usage errors, 2 when a numerical engine fails to
reach its error target.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, suites
from .kernels import BACKEND
from .quadrature import ConvergenceError, QuadratureSpec

COMMANDS = (
    "fock-curve",
    "pats-flatness",
    "delta-curves",
    "phase-averaged-curve",
    "invariance-suite",
    "cumulant-check",
)
OUT_DIR_ENV = "WEHRLNG_OUT_DIR"

# option name -> (QuadratureSpec field, type)
_QUAD_OPTIONS = {
    "radial_nodes": ("radial_nodes", int),
    "grid_nodes": ("grid_nodes_per_axis", int),
    "mc_samples": ("mc_samples", int),
    "seed": ("mc_seed", int),
    "target_err": ("target_abs_err", float),
    "mc_target_err": ("mc_target_err", float),
    "workers": ("workers", int),
}
_RUN_OPTIONS = {
    "cutoff": int,
    "m_max": int,
    "m": int,
    "K": int,
    "x_grid": str,
    "beta2_grid": str,
    "out_dir": str,
    "plot": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    cutoff: int | None = None
    m_max: int = 20
    m: int = 1
    K: int = 4
    x_grid: str = "0:0.9:0.1"
    beta2_grid: str = "0:5:0.25"
    out_dir: str = "."
    plot: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        try:
            self.xs = suites.parse_grid(self.x_grid)
            self.beta2s = suites.parse_grid(self.beta2_grid)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if any(not 0.0 <= x < 1.0 for x in self.xs):
            raise UsageError("x grid values must lie in [0, 1)")
        if any(b < 0 for b in self.beta2s):
            raise UsageError("|beta|^2 grid values must be >= 0")
        if self.m_max < 0 or self.m < 0:
            raise UsageError("photon numbers must be >= 0")
        if self.K < 3:
            raise UsageError("K must be >= 3")

    def as_dict(self):
        d = {k: getattr(self, k) for k in ("command", "cutoff", "m_max", "m", "K", "x_grid", "beta2_grid", "plot")}
        # worker count does not change results, so it stays out of the record
        d["quad"] = {k: v for k, v in dataclasses.asdict(self.quad).items() if k != "workers"}
        return d


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; dashes in keys become underscores."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _QUAD_OPTIONS and key not in _RUN_OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wehrlng", description="Wehrl-entropy non-Gaussianity sweeps and checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value file; command-line flags take precedence")
        p.add_argument("--out-dir", dest="out_dir", help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--cutoff", type=int)
        p.add_argument("--radial-nodes", dest="radial_nodes", type=int)
        p.add_argument("--grid-nodes", dest="grid_nodes", type=int)
        p.add_argument("--mc-samples", dest="mc_samples", type=int)
        p.add_argument("--mc-target-err", dest="mc_target_err", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--target-err", dest="target_err", type=float)
        p.add_argument("--workers", type=int)
        p.add_argument("--plot", action="store_const", const="true", default=None, help="also write SVG plots")
        if name == "fock-curve":
            p.add_argument("--m-max", dest="m_max", type=int)
        if name in ("pats-flatness", "delta-curves"):
            p.add_argument("--m", type=int)
            p.add_argument("--x-grid", dest="x_grid")
        if name == "phase-averaged-curve":
            p.add_argument("--beta2-grid", dest="beta2_grid")
        if name == "cumulant-check":
            p.add_argument("--K", type=int)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    merged = read_config_file(ns.config) if ns.config else {}
    for key, val in vars(ns).items():
        if key not in ("command", "config") and val is not None:
            merged[key] = val
    quad_kw, run_kw = {}, {}
    try:
        for key, val in merged.items():
            if key in _QUAD_OPTIONS:
                fname, typ = _QUAD_OPTIONS[key]
                quad_kw[fname] = typ(val)
            elif key in _RUN_OPTIONS:
                run_kw[key] = _RUN_OPTIONS[key](val)
        quad = QuadratureSpec(**quad_kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    run_kw.setdefault("out_dir", os.environ.get(OUT_DIR_ENV, "."))
    return RunConfig(ns.command, quad, **run_kw)


def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _plot(path: Path, columns, rows, x_col, y_cols):
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "wehrlng"
    import matplotlib.pyplot as plt

    xi = columns.index(x_col)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for y in y_cols:
        yi = columns.index(y)
        ax.plot([r[xi] for r in rows], [r[yi] for r in rows], marker="o", label=y)
    ax.set_xlabel(x_col)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def compute(cfg: RunConfig):
    """Return ``{stem: (columns, rows, x_col, y_cols)}`` for the configured command."""
    q, w = cfg.quad, cfg.quad.workers
    if cfg.command == "fock-curve":
        cols, rows = suites.fock_curve(cfg.m_max, q, w)
        return {"fock_curve": (cols, rows, "m", ["N"])}
    if cfg.command == "pats-flatness":
        cols, rows = suites.pats_flatness(cfg.m, cfg.xs, q, cfg.cutoff, w)
        return {f"pats_flatness_m{cfg.m}": (cols, rows, "x", ["N", "delta1", "delta2"])}
    if cfg.command == "delta-curves":
        cols, rows = suites.delta_curves(cfg.m, cfg.xs, cfg.cutoff, w)
        return {f"delta_curves_m{cfg.m}": (cols, rows, "x", ["delta1", "delta2"])}
    if cfg.command == "phase-averaged-curve":
        cols, rows = suites.phase_averaged_curve(cfg.beta2s, q, w)
        return {"phase_averaged_curve": (cols, rows, "beta2", ["N"])}
    if cfg.command == "invariance-suite":
        cols, rows = suites.invariance_suite(q, workers=w)
        return {"invariance_suite": (cols, rows, None, [])}
    cols, rows = suites.cumulant_check(cfg.K)
    return {"cumulant_check": (cols, rows, None, [])}


def run(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".wehrlng_write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory not writable: {exc}") from None
    results = compute(cfg)
    files = []
    for stem, (cols, rows, x_col, y_cols) in results.items():
        path = out / f"{stem}.csv"
        write_csv(path, cols, rows)
        files.append(path.name)
        if cfg.plot and x_col is not None:
            _plot(out / f"{stem}.svg", cols, rows, x_col, y_cols)
            files.append(f"{stem}.svg")
    manifest = {
        "version": __version__,
        "backend": BACKEND,
        "seed": cfg.quad.mc_seed,
        "config": cfg.as_dict(),
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"wehrlng: error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"wehrlng: convergence failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
