"""Command-line front end.

    givp simulate       --x0 3,4,0 --remap on --t-end 10 --out run/
    givp sweep          --lattice=-1:1:5 --remap on --out sweep/
    givp check-direction --radius 0.5 --samples 2048
    givp bessel-table   --n-max 3 --x 0,1,2

Every subcommand accepts ``--config FILE`` (a flat JSON object; flags given on
the command line override it), ``--out DIR`` and ``--dump-config``, which
prints the resolved configuration as JSON and exits.

Angles are radians everywhere. Values starting with ``-`` must be attached
with ``=`` (``--x0=-1,0,0``).

Exit codes: 0 success, 1 configuration/usage error, 2 divergence,
3 indeterminate direction check.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import CLASSIFICATIONS, constant_direction_check, convergence_verdict, lattice, sweep_initial_conditions
from .core import as_state
from .errors import (
    ConfigurationError,
    ContractViolation,
    DivergenceError,
    IndeterminateError,
    StepUnderflowError,
)
from .integrate import IntegratorConfig
from .special_fn import bessel_j
from .unicycle import BesselControllerParams, ThetaRemapParams, closed_loop_problem, simulate_unicycle

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_INDETERMINATE = 3

TRAJECTORY_COLUMNS = ("t", "x", "y", "theta", "u1", "u2")
SUMMARY_KEYS = (
    "config_echo",
    "classification",
    "final_state",
    "theta_final",
    "displacement",
    "final_norm",
    "integrator",
    "wall_time_s",
)
FIELDS = ("unicycle", "demo-constant", "demo-rotation", "demo-zero")

_NUM = {"type": ["number", "null"]}
SWEEP_ROW_SCHEMA = {
    "type": "object",
    "required": ["index", "x0", "x0_mapped", "converged", "final_norm", "theta_final",
                 "displacement", "max_excursion", "classification", "error"],
    "additionalProperties": False,
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "x0": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "x0_mapped": {"type": ["array", "null"], "items": {"type": "number"}},
        "converged": {"type": "boolean"},
        "final_norm": _NUM,
        "theta_final": _NUM,
        "displacement": _NUM,
        "max_excursion": _NUM,
        "classification": {"enum": list(CLASSIFICATIONS)},
        "error": {"type": ["string", "null"]},
    },
}
SWEEP_SCHEMA = {
    "type": "object",
    "required": ["config_echo", "n_rows", "rows", "counts", "wall_time_s"],
    "additionalProperties": False,
    "properties": {
        "config_echo": {"type": "object"},
        "n_rows": {"type": "integer"},
        "rows": {"type": "array", "items": SWEEP_ROW_SCHEMA},
        "counts": {
            "type": "object",
            "required": list(CLASSIFICATIONS),
            "additionalProperties": False,
            "properties": {c: {"type": "integer", "minimum": 0} for c in CLASSIFICATIONS},
        },
        "wall_time_s": {"type": "number"},
    },
}
SUMMARY_SCHEMA = {
    "type": "object",
    "required": list(SUMMARY_KEYS),
    "additionalProperties": False,
    "properties": {
        "config_echo": {"type": "object"},
        "classification": {"enum": list(CLASSIFICATIONS)},
        "final_state": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "theta_final": {"type": "number"},
        "displacement": {"type": "number"},
        "final_norm": {"type": "number"},
        "integrator": {"type": "object"},
        "wall_time_s": {"type": "number"},
    },
}


def fmt17(value: float) -> str:
    """Positional decimal with 17 significant digits (round-trips float64)."""
    return np.format_float_positional(float(value) + 0.0, precision=17, unique=False, fractional=False, trim="-")


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; one flat record shared by all commands."""

    # controller
    N: int = 5
    a: float = -1.0
    C: Optional[tuple] = None
    # initial-condition map
    remap: str = "on"
    zero_tol: float = 1e-12
    # integrator
    method: str = "rk4_fixed"
    h: float = 1e-3
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    t_end: float = 10.0
    record_every: int = 1
    # verdicts
    eps: float = 1e-3
    stationarity_tol: float = 1e-9
    # simulate
    x0: tuple = (3.0, 4.0, 0.0)
    # sweep
    grid: Optional[tuple] = None
    lattice: Optional[dict] = None
    # check-direction
    field: str = "unicycle"
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 0.5
    samples: int = 2048
    tolerance: float = 1e-6
    norm_floor: float = 1e-9
    # bessel-table
    n_max: int = 3
    x_values: tuple = (0.0, 1.0)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**{k: _freeze(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {f.name: _thaw(getattr(self, f.name)) for f in fields(self)}

    def controller(self) -> BesselControllerParams:
        return BesselControllerParams(N=_as_int(self.N, "N"), a=self.a, C=self.C)

    def remap_params(self) -> Optional[ThetaRemapParams]:
        if self.remap not in ("on", "off"):
            raise ConfigurationError(f"remap must be 'on' or 'off', got {self.remap!r}")
        return ThetaRemapParams(zero_tol=self.zero_tol) if self.remap == "on" else None

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            method=self.method,
            h=self.h,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            t_end=self.t_end,
            record_every=_as_int(self.record_every, "record_every"),
        )

    def grid_points(self) -> list:
        if self.grid is not None and self.lattice is not None:
            raise ConfigurationError("give either grid or lattice, not both")
        if self.lattice is not None:
            spec = self.lattice
            if not isinstance(spec, dict) or set(spec) != {"lower", "upper", "counts"}:
                raise ConfigurationError("lattice needs exactly the keys lower, upper, counts")
            try:
                pts = lattice(list(spec["lower"]), list(spec["upper"]), list(spec["counts"]))
            except (ContractViolation, TypeError) as exc:
                raise ConfigurationError(f"bad lattice: {exc}") from exc
        else:
            pts = list(self.grid or ())
        if not pts:
            raise ConfigurationError("empty grid")
        return [_state(p, 3, "grid point") for p in pts]

    def validate(self, command: str) -> None:
        """Build every typed record the command uses, so errors surface first."""
        for name in ("a", "zero_tol", "h", "rel_tol", "abs_tol", "t_end", "eps", "stationarity_tol",
                     "radius", "tolerance", "norm_floor"):
            _as_float(getattr(self, name), name)
        if command in ("simulate", "sweep", "check-direction"):
            self.controller()
            self.remap_params()
        if command in ("simulate", "sweep"):
            self.integrator()
            if self.eps <= 0 or self.stationarity_tol < 0:
                raise ConfigurationError("eps must be positive and stationarity_tol non-negative")
        if command == "simulate":
            _state(self.x0, 3, "x0")
        elif command == "sweep":
            self.grid_points()
        elif command == "check-direction":
            if self.field not in FIELDS:
                raise ConfigurationError(f"field must be one of {FIELDS}, got {self.field!r}")
            if not self.radius > 0:
                raise ConfigurationError(f"radius must be positive, got {self.radius}")
            if _as_int(self.samples, "samples") < 2:
                raise ConfigurationError("samples must be at least 2")
            if self.tolerance < 0 or not self.norm_floor > 0:
                raise ConfigurationError("tolerance must be >= 0 and norm_floor > 0")
            _state(self.center, 3, "center")
        elif command == "bessel-table":
            if _as_int(self.n_max, "n_max") < 0:
                raise ConfigurationError(f"n_max must be >= 0, got {self.n_max}")
            if not self.x_values:
                raise ConfigurationError("x list is empty")
            for v in self.x_values:
                _as_float(v, "x")


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(i) for i in v)
    if isinstance(v, dict):
        return {k: _freeze(i) if not isinstance(i, tuple) else i for k, i in v.items()}
    return v


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(i) for i in v]
    if isinstance(v, dict):
        return {k: _thaw(i) for k, i in v.items()}
    return v


def _as_float(v, name) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigurationError(f"{name} must be a finite number, got {v!r}")
    return float(v)


def _as_int(v, name) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigurationError(f"{name} must be an integer, got {v!r}")
    return int(v)


def _state(v, n, name):
    try:
        return as_state(v, n, what=name)
    except ContractViolation as exc:
        raise ConfigurationError(str(exc)) from exc


# -- argument parsing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _points(text: str) -> tuple:
    return tuple(_floats(p) for p in text.split(";") if p.strip())


def _lattice_spec(text: str) -> dict:
    """``lo:hi:count`` per axis, comma separated; one spec is broadcast to 3 axes."""
    try:
        parts = [tuple(p.split(":")) for p in text.split(",")]
        axes = [(float(lo), float(hi), int(c)) for lo, hi, c in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count[,lo:hi:count...], got {text!r}")
    if len(axes) == 1:
        axes *= 3
    return {
        "lower": tuple(a[0] for a in axes),
        "upper": tuple(a[1] for a in axes),
        "counts": tuple(a[2] for a in axes),
    }


def _add_global(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--config", metavar="PATH", default=default, help="JSON config file")
    p.add_argument("--out", metavar="DIR", default=default, help="output directory")
    p.add_argument("--dump-config", action="store_true", default=default or False,
                   help="print the resolved config as JSON and exit")


def _add_controller(p):
    g = p.add_argument_group("controller")
    g.add_argument("--N", dest="N", type=int, help="number of series terms (default 5)")
    g.add_argument("--a", dest="a", type=float, help="gain, must be negative (default -1)")
    g.add_argument("--C", dest="C", type=_floats, help="coefficients C_1..C_N (default all 1)")
    g.add_argument("--remap", choices=("on", "off"), help="heading remap theta0=0 -> 2*pi (default on)")
    g.add_argument("--zero-tol", dest="zero_tol", type=float,
                   help="|theta0| below this counts as zero for the remap (default 1e-12 rad)")


def _add_integrator(p):
    g = p.add_argument_group("integrator")
    g.add_argument("--method", choices=("rk4_fixed", "rk45_adaptive"))
    g.add_argument("--h", dest="h", type=float, help="fixed step in s (default 1e-3)")
    g.add_argument("--rel-tol", dest="rel_tol", type=float)
    g.add_argument("--abs-tol", dest="abs_tol", type=float)
    g.add_argument("--t-end", dest="t_end", type=float, help="final time in s (default 10)")
    g.add_argument("--record-every", dest="record_every", type=int)
    g.add_argument("--eps", type=float, help="convergence radius for the verdict (default 1e-3)")
    g.add_argument("--stationarity-tol", dest="stationarity_tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="givp", allow_abbrev=False, description="Generalized IVP toolkit for the unicycle closed loop.")
    _add_global(parser, None)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    common = dict(argument_default=argparse.SUPPRESS, allow_abbrev=False)
    p = sub.add_parser("simulate", help="integrate one closed-loop run", **common)
    _add_global(p, argparse.SUPPRESS)
    p.add_argument("--x0", type=_floats, help="initial state x,y,theta")
    _add_controller(p)
    _add_integrator(p)

    p = sub.add_parser("sweep", help="verdicts over a grid of initial states", **common)
    _add_global(p, argparse.SUPPRESS)
    p.add_argument("--grid", type=_points, help="points 'x,y,t;x,y,t;...'")
    p.add_argument("--lattice", type=_lattice_spec, help="lo:hi:count per axis (one spec = all axes)")
    _add_controller(p)
    _add_integrator(p)

    p = sub.add_parser("check-direction", help="constant-direction test of a closed-loop field", **common)
    _add_global(p, argparse.SUPPRESS)
    p.add_argument("--field", choices=FIELDS)
    p.add_argument("--center", type=_floats)
    p.add_argument("--radius", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--tolerance", type=float, help="angle tolerance in rad (default 1e-6)")
    p.add_argument("--norm-floor", dest="norm_floor", type=float)
    _add_controller(p)

    p = sub.add_parser("bessel-table", help="CSV of J_n(x)", **common)
    _add_global(p, argparse.SUPPRESS)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--x", dest="x_values", type=_floats, help="comma-separated arguments")
    return parser


_NON_CONFIG = {"command", "config", "out", "dump_config"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from exc
    cfg = RunConfig.from_dict(data)
    overrides = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    if overrides.get("grid") is not None or overrides.get("lattice") is not None:
        # a grid given on the command line replaces either form from the file
        cfg = dataclasses.replace(cfg, grid=None, lattice=None)
    return dataclasses.replace(cfg, **overrides)


# -- commands --------------------------------------------------------------


def _out_dir(path: Optional[str]) -> Path:
    out = Path(path or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_trajectory_csv(traj, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for t, x, u in zip(traj.times, traj.states, traj.inputs):
            w.writerow([fmt17(t), *(fmt17(v) for v in x), *(fmt17(v) for v in u)])


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(_json_safe(obj), indent=2) + "\n")


def cmd_simulate(cfg: RunConfig, out: Optional[str]) -> int:
    cfg.validate("simulate")
    integ = cfg.integrator()
    start = time.perf_counter()
    code = EXIT_OK
    try:
        traj = simulate_unicycle(cfg.x0, cfg.controller(), cfg.remap_params(), integ)
    except DivergenceError as exc:
        print(f"givp: divergence: {exc}", file=sys.stderr)
        traj, code = exc.trajectory, EXIT_DIVERGED
    except StepUnderflowError as exc:
        print(f"givp: step underflow: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    wall = time.perf_counter() - start
    verdict = convergence_verdict(traj, cfg.eps, cfg.stationarity_tol)
    out_dir = _out_dir(out)
    write_trajectory_csv(traj, out_dir / "trajectory.csv")
    summary = {
        "config_echo": cfg.to_dict(),
        "classification": verdict.classification,
        "final_state": traj.final_state.tolist(),
        "theta_final": verdict.theta_final,
        "displacement": verdict.displacement,
        "final_norm": verdict.final_norm,
        "integrator": traj.metadata["integrator"],
        "wall_time_s": wall,
    }
    _write_json(summary, out_dir / "summary.json")
    print(f"{verdict.classification}: final state {traj.final_state.tolist()}")
    return code


def cmd_sweep(cfg: RunConfig, out: Optional[str]) -> int:
    cfg.validate("sweep")
    start = time.perf_counter()
    table = sweep_initial_conditions(
        cfg.grid_points(),
        cfg.controller(),
        cfg.remap == "on",
        cfg.integrator(),
        cfg.eps,
        cfg.stationarity_tol,
        remap=cfg.remap_params(),
    )
    result = {"config_echo": cfg.to_dict(), "n_rows": len(table.rows), **table.as_dict(),
              "wall_time_s": time.perf_counter() - start}
    out_dir = _out_dir(out)
    _write_json(result, out_dir / "sweep.json")
    print(json.dumps(table.counts))
    return EXIT_OK


def _direction_field(cfg: RunConfig):
    if cfg.field == "unicycle":
        return closed_loop_problem(cfg.controller(), cfg.remap_params()).field
    if cfg.field == "demo-constant":
        return lambda x: np.array([1.0, 0.0, 0.0])
    if cfg.field == "demo-rotation":
        return lambda x: np.array([-x[1], x[0], 0.0])
    return lambda x: np.zeros(3)


def cmd_check_direction(cfg: RunConfig, out: Optional[str]) -> int:
    cfg.validate("check-direction")
    try:
        report = constant_direction_check(
            _direction_field(cfg),
            cfg.center,
            radius=cfg.radius,
            n_samples=int(cfg.samples),
            angle_tol=cfg.tolerance,
            norm_floor=cfg.norm_floor,
        )
    except IndeterminateError as exc:
        print(f"givp: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    result = {"field": cfg.field, **report.as_dict()}
    text = json.dumps(_json_safe(result), indent=2)
    print(text)
    if out:
        (_out_dir(out) / "direction.json").write_text(text + "\n")
    return EXIT_OK


def cmd_bessel_table(cfg: RunConfig, out: Optional[str]) -> int:
    cfg.validate("bessel-table")
    rows = [("n", "x", "value")]
    for x in cfg.x_values:
        for n in range(int(cfg.n_max) + 1):
            rows.append((str(n), fmt17(x), fmt17(bessel_j(n, x))))
    text = "".join(",".join(r) + "\n" for r in rows)
    sys.stdout.write(text)
    if out:
        (_out_dir(out) / "bessel_table.csv").write_text(text)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check-direction": cmd_check_direction,
    "bessel-table": cmd_bessel_table,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            cfg.validate(args.command)
            print(json.dumps(cfg.to_dict(), indent=2))
            return EXIT_OK
        return COMMANDS[args.command](cfg, args.out)
    except (ConfigurationError, ContractViolation, TypeError) as exc:
        print(f"givp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
