"""Command-line entry point: ``focusfocus <command> [options]``.

Exit codes: 0 success, 1 selftest failure, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import dynamics, fiber, obstruction, poisson, singularity
from .fiber import EmptyFiberError, FiberSolverError
from .singularity import MomentValue

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

_records = {"type": "array", "items": {
    "type": "object",
    "required": ["coeff", "exponents"],
    "properties": {"coeff": {"type": "number"}, "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
}}

SYSTEM_SCHEMA = {
    "type": "object",
    "properties": {
        "builtin": {"enum": list(poisson.BUILTIN_NAMES)},
        "bracket": {"enum": ["e3", "so4", "lambda", "canonical4", "custom"]},
        "lambda": {"type": "number"},
        "structure_constants": {"type": "array"},
        "casimirs": {"type": "array", "items": _records},
        "casimir_values": {"type": "array", "items": {"type": "number"}},
        "hamiltonian": _records,
        "integral": _records,
        "name": {"type": "string"},
    },
    "anyOf": [{"required": ["builtin"]}, {"required": ["bracket", "hamiltonian", "integral"]}],
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": ["classify", "trace-fiber", "moment-image", "integrate", "obstruction", "selftest"]},
        "system": {"oneOf": [{"type": "string"}, SYSTEM_SCHEMA]},
        "casimirs": {"type": "array", "items": {"type": "number"}},
        "lambda": {"type": "number"},
        "moment": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "grid": {"type": "array", "items": {"type": "number"}, "minItems": 5, "maxItems": 5},
        "n_points": {"type": "integer", "minimum": 1},
        "n_restarts": {"type": "integer", "minimum": 1},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "t_end": {"type": "number", "minimum": 0},
        "x0": {"type": "array", "items": {"type": "number"}},
        "seed": {"type": "integer"},
        "out": {"type": "string"},
        "manifold": {"type": "string"},
        "descriptor": {"type": "object"},
        "n": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


class InvalidInput(ValueError):
    pass


def _floats(text: str, n: int | None = None, sep: str = ",") -> list[float]:
    try:
        vals = [float(v) for v in text.split(sep)]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse numbers from {text!r}") from exc
    if n is not None and len(vals) != n:
        raise InvalidInput(f"expected {n} values in {text!r}")
    return vals


def _load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InvalidInput(f"config {path} failed validation: {exc.message}") from exc
    return cfg


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from ``--config``; explicit flags win."""
    if not getattr(args, "config", None):
        return args
    cfg = _load_config(args.config)
    if "command" in cfg and cfg["command"] != args.command:
        raise InvalidInput(f"config is for {cfg['command']!r}, invoked {args.command!r}")
    conv = {
        "casimirs": lambda v: ",".join(repr(float(x)) for x in v),
        "moment": lambda v: ",".join(repr(float(x)) for x in v),
        "grid": lambda v: f"{v[0]}:{v[1]}:{v[2]}:{v[3]}:{int(v[4])}",
        "x0": lambda v: ",".join(repr(float(x)) for x in v),
        "descriptor": json.dumps,
    }
    for key, val in cfg.items():
        if key == "command":
            continue
        attr = "lam" if key == "lambda" else key
        if getattr(args, attr, None) is None:
            setattr(args, attr, conv[key](val) if key in conv else val)
    return args


def _system(args) -> poisson.SystemSpec:
    spec = args.system if args.system is not None else "e3-form41"
    casimirs = _floats(args.casimirs) if args.casimirs else None
    try:
        if isinstance(spec, dict):
            jsonschema.validate(spec, SYSTEM_SCHEMA)
            sys_ = poisson.system_from_descriptor(spec)
            if casimirs is not None:
                sys_ = sys_.with_casimirs(casimirs)
            return sys_
        if spec.endswith(".json"):
            desc = json.loads(Path(spec).read_text())
            jsonschema.validate(desc, SYSTEM_SCHEMA)
            sys_ = poisson.system_from_descriptor(desc)
            return sys_.with_casimirs(casimirs) if casimirs is not None else sys_
        return poisson.builtin_system(spec, casimirs, args.lam)
    except KeyError as exc:
        raise InvalidInput(str(exc.args[0])) from exc
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise InvalidInput(f"bad system descriptor: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- commands -------------------------------------------------------------------

def cmd_classify(args) -> int:
    sys_ = _system(args)
    pts = singularity.find_rank0_points(sys_, n_restarts=args.n_restarts or 200, seed=args.seed or 0)
    _emit(_dumps([p.to_json() for p in pts]), args.out)
    return EXIT_OK


def cmd_trace_fiber(args) -> int:
    sys_ = _system(args)
    h, f = _floats(args.moment, 2) if args.moment else (1.0, 0.0)
    mv = MomentValue(h, f)
    try:
        fs = fiber.sample_fiber(sys_, mv, n_points=args.n_points or 5000, seed=args.seed or 0)
    except EmptyFiberError:
        _emit(_dumps({"moment": {"h": h, "f": f}, "n_points": 0, "n_components": 0, "complexity": 0,
                      "empty": True, "points": []}), args.out)
        return EXIT_OK
    payload = fs.to_json(include_points=not args.no_points)
    payload["empty"] = False
    _emit(_dumps(payload), args.out)
    return EXIT_OK


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 5:
        raise InvalidInput("grid must be hmin:hmax:fmin:fmax:res")
    hmin, hmax, fmin, fmax = _floats(":".join(parts[:4]), 4, sep=":")
    try:
        res = int(parts[4])
    except ValueError as exc:
        raise InvalidInput(f"bad grid resolution {parts[4]!r}") from exc
    if res < 1:
        raise InvalidInput("grid resolution must be positive")
    return (hmin, hmax), (fmin, fmax), res


def cmd_moment_image(args) -> int:
    sys_ = _system(args)
    hr, fr, res = _parse_grid(args.grid or "-0.5:2:-1.5:1.5:11")
    cells = fiber.moment_image(sys_, hr, fr, res, seed=args.seed or 0,
                               restarts_per_cell=args.n_restarts or fiber.MIN_EMPTY_RESTARTS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "f", "exists", "complexity"])
    for c in cells:
        w.writerow([repr(c.h), repr(c.f), c.exists, c.complexity])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    sys_ = _system(args)
    if args.x0:
        x0 = np.array(_floats(args.x0, sys_.dim))
    else:
        pts = sys_.orbit.sample(16, np.random.default_rng(args.seed or 0))
        if len(pts) == 0:
            raise RuntimeError("could not draw an initial point on the orbit")
        x0 = pts[0]
    dt = args.dt if args.dt is not None else 1e-3
    t_end = args.t_end if args.t_end is not None else 10.0
    traj = dynamics.integrate(sys_, x0, t_end, dt)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}" for i in range(sys_.dim)])
    for t, x in zip(traj.times, traj.states):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in x])
    report = _dumps({"system": sys_.name, "dt": dt, "t_end": t_end, "drift": dynamics.drift_report(traj)})
    if args.out:
        Path(args.out).write_text(buf.getvalue())
        Path(args.drift_out or (str(args.out) + ".drift.json")).write_text(report)
    else:
        sys.stdout.write(buf.getvalue())
        sys.stderr.write(report)
    return EXIT_OK


def cmd_obstruction(args) -> int:
    if args.n is None:
        raise InvalidInput("--n is required")
    try:
        if args.descriptor:
            text = args.descriptor
            if not text.lstrip().startswith("{"):
                text = Path(text).read_text()
            desc = obstruction.ManifoldDescriptor.from_json(json.loads(text))
        elif args.manifold:
            desc = obstruction.descriptor_from_name(args.manifold)
        else:
            raise InvalidInput("give --manifold or --descriptor")
        verdict = obstruction.admits_complexity(desc, int(args.n))
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise InvalidInput(str(exc)) from exc
    out = {"manifold": desc.to_json(), "n": int(args.n), **verdict.to_json()}
    _emit(_dumps(out), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    report = run_selftest(args.seed or 0)
    _emit(_dumps(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


# --- parser -------------------------------------------------------------------

def _system_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--system", help=f"built-in name ({', '.join(poisson.BUILTIN_NAMES)}) or a JSON descriptor file")
    p.add_argument("--casimirs", help="orbit Casimir values, comma separated (e.g. 1,0)")
    p.add_argument("--lambda", dest="lam", type=float, help="bracket parameter for lambda-form41")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--config", help="JSON file with the same options")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="focusfocus", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="find and label rank-0 points",
                       description="singularity.find_rank0_points + classify: rank-0 points of the moment map "
                                   "labeled by the spectrum of the linearized flow of aH + bF "
                                   "(focus-focus when the roots are +-x +- iy).")
    _system_opts(p)
    p.add_argument("--n-restarts", type=int)
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace-fiber", help="sample one fiber and measure its complexity",
                       description="fiber.sample_fiber: points on {Casimirs = c, H = h, F = f}, connected "
                                   "components, and the number of rank-0 points (complexity of the focus fiber).")
    _system_opts(p)
    p.add_argument("--moment", help="h,f")
    p.add_argument("--n-points", type=int)
    p.add_argument("--no-points", action="store_true", help="omit the point list from the JSON")
    _common(p)
    p.set_defaults(func=cmd_trace_fiber)

    p = sub.add_parser("moment-image", help="tabulate the bifurcation diagram as CSV",
                       description="fiber.moment_image: fiber existence and rank-0 counts on an (h, f) grid "
                                   "of the moment map image.")
    _system_opts(p)
    p.add_argument("--grid", help="hmin:hmax:fmin:fmax:res (write --grid=-1:... when hmin is negative)")
    p.add_argument("--n-restarts", type=int, help="restarts per cell; fewer than 500 leaves empty cells 'unknown'")
    _common(p)
    p.set_defaults(func=cmd_moment_image)

    p = sub.add_parser("integrate", help="integrate the Euler equations",
                       description="dynamics.integrate: RK4 on xdot_i = {x_i, H} with projection onto the "
                                   "coadjoint orbit; CSV trajectory plus JSON drift report.")
    _system_opts(p)
    p.add_argument("--x0", help="initial point, comma separated (default: random orbit point)")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--drift-out", help="drift report path (default: <out>.drift.json)")
    _common(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("obstruction", help="evaluate the complexity obstruction rules",
                       description="obstruction.admits_complexity: pi_2 and dim H^2 bounds plus the "
                                   "catalog refinements (CP^2, products of surfaces, S^2 x R^2, cotangent "
                                   "bundles with magnetic term, e(3)* and so(4)* orbits).")
    p.add_argument("--manifold", help="shorthand, e.g. cp2, s2xs2:1,1, product:1,2, e3:0, so4:0, "
                                      "cotangent:0:exact, generic:compact,2,pi2")
    p.add_argument("--descriptor", help="descriptor JSON (inline or file path)")
    p.add_argument("--n", type=int, help="requested complexity")
    _common(p)
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("selftest", help="run the bundled property checks",
                       description="selftest.run_selftest: involution, bracket axioms, canonical spectrum, "
                                   "the complexity-2 e(3)* fiber, the focus-focus window and obstruction "
                                   "consistency; writes a deterministic JSON report.")
    _common(p)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _merge_config(args)
        return args.func(args)
    except (InvalidInput, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (dynamics.ProjectionDivergenceError, FiberSolverError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
