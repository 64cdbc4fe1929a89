"""Command-line front end: run experiments over parameter grids, write CSV/JSON.

Every grid flag (--theta, --g, --omega) takes a comma-separated list; rows are
emitted for the Cartesian product in the order theta, g, omega.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import berry, dynamics, holonomy, mixed
from .linalg import wrap_phase
from .model import (
    RECONSTRUCTION_DISCLAIMER,
    BasisLabel,
    CouplingKind,
    ModelParams,
    basis_path,
    degenerate_basis,
    reply_level_map,
)

COMMANDS = ("connection", "holonomy", "berry", "evolve", "breakdown", "mixed", "sweep")
SWEEP_TARGETS = COMMANDS[:-1]

COLUMNS = {
    "connection": ["theta", "basis", "step", "a00_re", "a00_im", "a01_re", "a01_im",
                   "a10_re", "a10_im", "a11_re", "a11_im", "analytic_dev"],
    "holonomy": ["theta", "eigenphase_1", "eigenphase_2", "trace_re", "trace_im",
                 "single_spin_phase", "max_dev"],
    "berry": ["theta", "g", "level", "n_points", "gamma", "raw_unwrapped",
              "discretization_estimate"],
    "evolve": ["theta", "g", "omega", "ratio", "total", "dynamical", "geometric",
               "final_fidelity", "min_fidelity", "loop_duration"],
    "breakdown": ["theta", "g", "omega", "ratio", "final_fidelity", "min_fidelity",
                  "geometric", "berry_phase", "loop_duration"],
    "mixed": ["theta", "g", "subsystem", "p_plus", "omega_plus", "omega_minus", "gamma",
              "weight_variation"],
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    theta: tuple = (math.pi / 2,)
    g: tuple = (0.0,)
    omega: tuple = (1e-3,)
    b: float = 1.0
    coupling: str = CouplingKind.XX_MINUS_YY.value
    points: int = 2000
    steps: int | None = None
    loops: int = 1
    level: int = 3
    subsystem: int = 2
    step: float = 1e-4
    target: str | None = None
    out: str | None = None
    format: str = "csv"
    jobs: int = 1
    plots: tuple = ()

    @property
    def kind(self) -> str:
        return self.target if self.command == "sweep" else self.command

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("theta", "g", "omega", "plots"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        kw = {k: v for k, v in d.items() if k in names}
        for k in ("theta", "g", "omega", "plots"):
            if k in kw:
                kw[k] = tuple(kw[k])
        return cls(**kw)

    def params(self, theta, g, omega) -> ModelParams:
        return ModelParams(theta=theta, g=g, b_field=self.b, omega=omega,
                           coupling_kind=CouplingKind(self.coupling))


def _float_list(text: str):
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _plot_spec(text: str):
    y, sep, x = text.partition(":")
    if not sep or not x or not y:
        raise argparse.ArgumentTypeError(f"expected YCOL:XCOL, got {text!r}")
    return f"{y}:{x}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="composite-berry",
        description="Berry phases, Wilson loops and subsystem phases of a two-qubit system "
                    "in a rotating field.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--target", choices=SWEEP_TARGETS, help="experiment run by 'sweep'")
    p.add_argument("--theta", type=_float_list, help="polar angle(s) in radians")
    p.add_argument("--g", type=_float_list, help="coupling strength(s)")
    p.add_argument("--omega", type=_float_list, help="loop angular velocity(ies)")
    p.add_argument("--b", type=float, default=1.0, help="field strength B")
    p.add_argument("--coupling", choices=[k.value for k in CouplingKind],
                   default=CouplingKind.XX_MINUS_YY.value)
    p.add_argument("--points", type=int, default=2000,
                   help="phi grid points (berry/mixed) or Wilson-loop steps (holonomy)")
    p.add_argument("--steps", type=int, help="RK4 steps per loop (default: automatic)")
    p.add_argument("--loops", type=int, default=1)
    p.add_argument("--level", type=int, default=3, help="tracked level, ascending index 0..3")
    p.add_argument("--subsystem", type=int, choices=(1, 2), default=2)
    p.add_argument("--step", type=float, default=1e-4, help="finite-difference step for connection")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--plot", action="append", type=_plot_spec, default=[],
                   help="emit YCOL:XCOL plot data next to --out; repeatable")
    return p


def parse_args(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)

    def fail(msg):
        parser.error(msg)  # exits with status 2

    if ns.command == "sweep":
        if ns.target is None:
            fail("argument --target: required for sweep")
        if ns.theta is None and ns.g is None and ns.omega is None:
            fail("argument --theta/--g/--omega: sweep needs at least one grid")
    elif ns.target is not None:
        fail("argument --target: only valid with sweep")
    kind = ns.target if ns.command == "sweep" else ns.command
    defaults = {"theta": (math.pi / 2,), "g": (0.0,), "omega": (1e-3,)}
    if kind == "breakdown":
        defaults["g"] = (0.1, 0.01, 0.001)
    grids = {k: getattr(ns, k) or v for k, v in defaults.items()}
    for th in grids["theta"]:
        if not 0.0 <= th <= math.pi:
            fail(f"argument --theta: {th} outside [0, pi]")
    for g in grids["g"]:
        if g < 0 or (kind == "breakdown" and g == 0):
            fail(f"argument --g: {g} not allowed")
    for om in grids["omega"]:
        if om <= 0:
            fail(f"argument --omega: {om} must be > 0")
    if ns.b <= 0:
        fail("argument --b: must be > 0")
    if ns.points < 16:
        fail("argument --points: must be >= 16")
    if ns.steps is not None and ns.steps < 1000:
        fail("argument --steps: must be >= 1000")
    if ns.loops < 1:
        fail("argument --loops: must be >= 1")
    if not 0 <= ns.level <= 3:
        fail("argument --level: must be in 0..3")
    if ns.jobs < 1:
        fail("argument --jobs: must be >= 1")
    if not 1e-6 <= ns.step <= 1e-2:
        fail("argument --step: must lie in [1e-6, 1e-2]")
    cols = COLUMNS[kind]
    for spec in ns.plot:
        for c in spec.split(":"):
            if c not in cols:
                fail(f"argument --plot: unknown column {c!r} for {kind}")
    return RunConfig(
        command=ns.command, target=ns.target, b=ns.b, coupling=ns.coupling,
        points=ns.points, steps=ns.steps, loops=ns.loops, level=ns.level,
        subsystem=ns.subsystem, step=ns.step, out=ns.out, format=ns.format,
        jobs=ns.jobs, plots=tuple(ns.plot), **grids,
    )


# row builders: each takes (config, theta, g, omega) and returns a list of dicts

def _rows_connection(cfg, theta, g, omega):
    c = math.cos(theta / 2) ** 2
    expected = {
        BasisLabel.REPLY: np.array([[c - 0.5, 0.5], [0.5, c - 0.5]]),
        BasisLabel.PRIMED: np.array([[c, 0.0], [0.0, c]]),
    }
    rows = []
    for label in BasisLabel:
        a = holonomy.connection_numeric(basis_path(label, theta), 0.0, cfg.step)
        row = {"theta": theta, "basis": label.value, "step": cfg.step}
        for i in range(2):
            for j in range(2):
                row[f"a{i}{j}_re"] = a[i, j].real
                row[f"a{i}{j}_im"] = a[i, j].imag
        row["analytic_dev"] = float(np.max(np.abs(a - expected[label])))
        rows.append(row)
    return rows


def _rows_holonomy(cfg, theta, g, omega):
    h = holonomy.wilson_loop(holonomy.connection_analytic(theta), max(cfg.points, 16))
    single = wrap_phase(2 * math.pi * math.cos(theta / 2) ** 2)
    dev = max(float(abs(wrap_phase(p - single))) for p in h.eigenphases)
    return [{
        "theta": theta, "eigenphase_1": h.eigenphases[0], "eigenphase_2": h.eigenphases[1],
        "trace_re": h.trace.real, "trace_im": h.trace.imag,
        "single_spin_phase": single, "max_dev": dev,
    }]


def _rows_berry(cfg, theta, g, omega):
    res = berry.eigenstate_berry_phase(cfg.params(theta, g, omega), cfg.level, cfg.points)
    return [{
        "theta": theta, "g": g, "level": cfg.level, "n_points": res.n_points,
        "gamma": res.gamma, "raw_unwrapped": res.raw_unwrapped,
        "discretization_estimate": res.discretization_estimate,
    }]


def _rows_evolve(cfg, theta, g, omega):
    params = cfg.params(theta, g, omega)
    _, rep = dynamics.run_cycle(params, cfg.level, cfg.loops, cfg.steps)
    return [{
        "theta": theta, "g": g, "omega": omega, "ratio": rep.adiabaticity_ratio,
        "total": rep.total_phase, "dynamical": rep.dynamical_phase,
        "geometric": rep.geometric_phase, "final_fidelity": rep.final_fidelity,
        "min_fidelity": rep.min_fidelity, "loop_duration": rep.loop_duration,
    }]


def _rows_breakdown(cfg, theta, g, omega):
    params = cfg.params(theta, g, omega)
    row = dynamics.breakdown_sweep(theta, omega, [g], cfg.steps, cfg.level, base=params,
                                   berry_points=cfg.points)[0]
    return [{
        "theta": theta, "g": row.g, "omega": omega, "ratio": row.ratio,
        "final_fidelity": row.final_fidelity, "min_fidelity": row.min_fidelity,
        "geometric": row.geometric_phase, "berry_phase": row.berry_phase,
        "loop_duration": row.loop_duration,
    }]


def _rows_mixed(cfg, theta, g, omega):
    if g == 0:
        path = berry.path_from_function(lambda p: degenerate_basis(theta, p).psi_a, cfg.points)
    else:
        path = berry.smooth_eigenpath(cfg.params(theta, g, omega), cfg.level, cfg.points)
    res = mixed.subsystem_phase(mixed.reduced_bloch_path(path, cfg.subsystem))
    return [{
        "theta": theta, "g": g, "subsystem": cfg.subsystem, "p_plus": res.p_plus,
        "omega_plus": res.omega_plus, "omega_minus": res.omega_minus,
        "gamma": res.gamma, "weight_variation": res.weight_variation,
    }]


ROW_BUILDERS = {
    "connection": _rows_connection,
    "holonomy": _rows_holonomy,
    "berry": _rows_berry,
    "evolve": _rows_evolve,
    "breakdown": _rows_breakdown,
    "mixed": _rows_mixed,
}

# grids that each experiment actually depends on; the others collapse to one value
_USES = {
    "connection": ("theta",),
    "holonomy": ("theta",),
    "berry": ("theta", "g"),
    "evolve": ("theta", "g", "omega"),
    "breakdown": ("theta", "g", "omega"),
    "mixed": ("theta", "g"),
}


def grid_points(cfg: RunConfig):
    used = _USES[cfg.kind]
    axes = [getattr(cfg, k) if k in used else getattr(cfg, k)[:1] for k in ("theta", "g", "omega")]
    points = list(itertools.product(*axes))
    if cfg.kind == "breakdown":
        # rows ordered by g descending within each (theta, omega)
        points.sort(key=lambda t: (axes[0].index(t[0]), axes[2].index(t[2]), -t[1]))
    return points


def _evaluate(args):
    cfg, point = args
    return ROW_BUILDERS[cfg.kind](cfg, *point)


def compute_rows(cfg: RunConfig):
    points = grid_points(cfg)
    tasks = [(cfg, pt) for pt in points]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(tasks))) as pool:
            chunks = list(pool.map(_evaluate, tasks))
    else:
        chunks = [_evaluate(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            v = 0.0  # drop the sign of -0.0
        return format(v, ".12g")
    return str(value)


def meta_record(cfg: RunConfig) -> dict:
    meta = {
        "config": cfg.to_dict(),
        "coupling_kind": cfg.coupling,
        "disclaimer": RECONSTRUCTION_DISCLAIMER,
        "columns": COLUMNS[cfg.kind],
        "units": "hbar = 1; energies in units of B",
    }
    if cfg.kind in ("berry", "evolve", "breakdown", "mixed"):
        theta = cfg.theta[0]
        p = ModelParams(theta=theta, g=max(cfg.g[0], 0.0), b_field=cfg.b,
                        coupling_kind=CouplingKind(cfg.coupling))
        meta["level_map"] = reply_level_map(p)
    return meta


def render(cfg: RunConfig, rows) -> str:
    cols = COLUMNS[cfg.kind]
    meta = meta_record(cfg)
    if cfg.format == "json":
        doc = {
            "meta": meta,
            "records": [{c: _json_value(r[c]) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    lines = ["# meta " + json.dumps(meta, sort_keys=True), ",".join(cols)]
    lines += [",".join(fmt(r[c]) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def _json_value(v):
    # same 12-digit rounding as the CSV so both formats carry identical numbers
    if isinstance(v, (float, np.floating)):
        f = float(fmt(v))
        return f if math.isfinite(f) else fmt(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def emit_plot_data(rows, command: str, plots, directory) -> list:
    """Write one whitespace-separated x y file per YCOL:XCOL spec."""
    directory = Path(directory)
    written = []
    cols = set(rows[0]) if rows else set()
    for spec in plots:
        ycol, xcol = spec.split(":")
        for c in (xcol, ycol):
            if c not in cols:
                raise UsageError(f"unknown column {c!r}")
        path = directory / f"{command}_{ycol}_vs_{xcol}.dat"
        text = "".join(f"{fmt(r[xcol])} {fmt(r[ycol])}\n" for r in rows)
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def run(cfg: RunConfig) -> int:
    try:
        rows = compute_rows(cfg)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = render(cfg, rows)
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(text, encoding="utf-8")
        plot_dir = out.parent
    else:
        sys.stdout.write(text)
        plot_dir = Path.cwd()
    if cfg.plots:
        try:
            emit_plot_data(rows, cfg.kind, cfg.plots, plot_dir)
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    return 0


def main(argv=None) -> int:
    cfg = parse_args(sys.argv[1:] if argv is None else argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
