"""Command-line entry point: ``eikonal <command> [options]``.

Every command writes its data files atomically and prints a one-line JSON
summary.  Exit status is 0 on success, 2 when ``validate`` finds a tolerance
exceeded and 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .characteristics import HermitianSolver, caustic_edges
from .ensembles import GUE, Elliptic, Ginibre, ensemble_from_json
from .errors import ConfigError, EikonalError
from .hciz import HCIZProblem, action_evaluate, bridge_fluid, euler_match_velocity
from .measures import AngularMeasure, SpectralMeasure
from .montecarlo import (disk_radial_cdf, eigendecompose, ks_distance, overlap_stats,
                         run_replicas, sample_ensemble, semicircle_cdf)
from .spectra import (FieldGrid2D, density_2d, elliptic_field, ginibre_field, numeric_field,
                      overlap_correlator, support_boundary)
from .unitary import unitary_density
from .validation import CASES, run_case

COMMANDS = ("density", "field2d", "overlap", "boundary", "edges", "unitary", "hciz", "mc",
            "validate")

DEFAULTS = {
    "ensemble": "gue", "initial": None, "t": 1.0, "grid": None, "ygrid": None,
    "tgrid": "0.0025:0.9975:400", "epsilon": 1e-6, "seed": 0, "out": None, "n": None,
    "seeds": None, "case": "all", "rays": 256, "bins": 64, "problem": None,
}

GRID_DEFAULTS = {"density": "-3:3:601", "field2d": "-1.5:1.5:201", "overlap": "-1.5:1.5:201",
                 "unitary": f"{-math.pi}:{math.pi}:1001", "hciz": "-1.1:1.1:400"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        field = "command"
        for token in message.replace("/", " ").split():
            if token.startswith("--"):
                field = token[2:].rstrip(":")
                break
        raise ConfigError(field, message)


def _merge_negative_values(argv):
    """Turn ``--grid -3:3:601`` into ``--grid=-3:3:601`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None and nxt.startswith("-")
                and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eikonal", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file with option defaults")
    ap.add_argument("--ensemble", help="variant name or JSON {variant, params}")
    ap.add_argument("--initial", help="initial atoms as JSON [[location, weight], ...]")
    ap.add_argument("--problem", help="HCIZ end spectra as JSON {atoms_a, atoms_b}")
    ap.add_argument("--t", type=float)
    ap.add_argument("--grid", help="min:max:points")
    ap.add_argument("--ygrid", help="min:max:points for the imaginary axis")
    ap.add_argument("--tgrid", help="min:max:points in bridge time")
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output file or directory")
    ap.add_argument("--n", type=int, help="matrix size")
    ap.add_argument("--seeds", type=int, help="number of replicas")
    ap.add_argument("--case", help="validation case name or 'all'")
    ap.add_argument("--rays", type=int)
    ap.add_argument("--bins", type=int)
    return ap


def resolve_config(argv) -> dict:
    args = build_parser().parse_args(_merge_negative_values(list(argv)))
    cfg = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError("config", f"file {path} does not exist")
        try:
            loaded = io.read_json(path)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown option")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["grid"] is None:
        cfg["grid"] = GRID_DEFAULTS.get(args.command)
    return cfg


def parse_grid(spec, name="grid") -> np.ndarray:
    if isinstance(spec, dict):
        parts = [spec.get("min"), spec.get("max"), spec.get("points")]
    elif isinstance(spec, str):
        parts = spec.split(":")
    else:
        raise ConfigError(name, "expected min:max:points")
    if len(parts) != 3:
        raise ConfigError(name, "expected min:max:points")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"cannot parse {spec!r}") from exc
    if pts < 2:
        raise ConfigError(name, "needs at least 2 points")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
        raise ConfigError(name, "max must exceed min")
    return np.linspace(lo, hi, pts)


def _json_arg(value, name):
    if isinstance(value, str):
        try:
            return json.loads(value)
        except json.JSONDecodeError:
            return value
    return value


def parse_ensemble(value):
    obj = _json_arg(value, "ensemble")
    try:
        return ensemble_from_json(obj)
    except (EikonalError, TypeError, ValueError) as exc:
        raise ConfigError("ensemble", str(exc)) from exc


def parse_initial(value, default):
    if value is None:
        return default
    try:
        pairs = _json_arg(value, "initial")
        return SpectralMeasure.from_pairs(pairs)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError("initial", str(exc)) from exc


def _positive_t(cfg, allow_zero=True):
    t = cfg["t"]
    try:
        t = float(t)
    except (TypeError, ValueError) as exc:
        raise ConfigError("t", "must be a number") from exc
    if not math.isfinite(t) or t < 0 or (t == 0 and not allow_zero):
        raise ConfigError("t", "must be positive" if not allow_zero else "must be non-negative")
    return t


def _out(cfg, default):
    return Path(cfg["out"]) if cfg["out"] else Path(default)


# ---------------------------------------------------------------- commands


def cmd_density(cfg):
    spec = parse_ensemble(cfg["ensemble"])
    t = _positive_t(cfg)
    x = parse_grid(cfg["grid"])
    eps = float(cfg["epsilon"])
    if not eps > 0:
        raise ConfigError("epsilon", "must be positive")
    mu = parse_initial(cfg["initial"], SpectralMeasure.point(0.0))
    if t == 0:
        g = mu.resolvent(x + 1j * eps)
    else:
        g = HermitianSolver(mu, spec, t).solve_many(x + 1j * eps)
    rho = np.maximum(0.0, -g.imag / math.pi)
    path = io.write_csv(_out(cfg, "density.csv"), ["x", "rho"], [x, rho])
    return {"outputs": [str(path)], "points": int(x.size),
            "mass": float(np.trapezoid(rho, x))}


def _field_sampler(cfg):
    spec = parse_ensemble(cfg["ensemble"] if cfg["ensemble"] != "gue" else "ginibre")
    t = _positive_t(cfg, allow_zero=False)
    mu = parse_initial(cfg["initial"], None)
    if mu is None and isinstance(spec, Ginibre):
        return ginibre_field(t), t
    if mu is None and isinstance(spec, Elliptic) and abs(spec.tau) < 1:
        return elliptic_field(spec.tau, t), t
    return numeric_field(mu or SpectralMeasure.point(0.0), spec, t), t


def _field_grid(cfg):
    sampler, t = _field_sampler(cfg)
    x = parse_grid(cfg["grid"])
    y = parse_grid(cfg["ygrid"], "ygrid") if cfg["ygrid"] else x
    return FieldGrid2D.from_sampler(sampler, x, y), t


def cmd_field2d(cfg):
    fld, _ = _field_grid(cfg)
    rho = density_2d(fld)
    xx, yy = np.meshgrid(rho.x, rho.y)
    path = io.write_csv(_out(cfg, "field2d.csv"), ["x", "y", "rho"], [xx, yy, rho.values])
    return {"outputs": [str(path)], "mass": rho.integral()}


def cmd_overlap(cfg):
    fld, _ = _field_grid(cfg)
    o = overlap_correlator(fld)
    xx, yy = np.meshgrid(o.x, o.y)
    path = io.write_csv(_out(cfg, "overlap.csv"), ["x", "y", "O"], [xx, yy, o.values])
    return {"outputs": [str(path)], "integral": o.integral()}


def cmd_boundary(cfg):
    sampler, t = _field_sampler(cfg)
    rays = int(cfg["rays"])
    if rays < 3:
        raise ConfigError("rays", "needs at least 3")
    pts = np.array(support_boundary(lambda z: sampler(z)[1], t, rays=rays))
    path = io.write_csv(_out(cfg, "boundary.csv"), ["x", "y"], [pts.real, pts.imag])
    return {"outputs": [str(path)], "rays": rays}


def cmd_edges(cfg):
    spec = parse_ensemble(cfg["ensemble"])
    t = _positive_t(cfg, allow_zero=False)
    mu = parse_initial(cfg["initial"], SpectralMeasure.point(0.0))
    edges = caustic_edges(mu, spec, t)
    path = io.write_json(_out(cfg, "edges.json"), {"schema": io.SCHEMA, "t": t, "edges": edges})
    return {"outputs": [str(path)], "edges": edges}


def cmd_unitary(cfg):
    t = _positive_t(cfg)
    theta = parse_grid(cfg["grid"])
    init = cfg["initial"]
    if init is None:
        mu = AngularMeasure.point(0.0)
    else:
        try:
            pairs = _json_arg(init, "initial")
            mu = AngularMeasure([p[0] for p in pairs], [p[1] for p in pairs])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError("initial", str(exc)) from exc
    field = unitary_density(mu, theta, t, float(cfg["epsilon"]))
    path = io.write_csv(_out(cfg, "unitary.csv"), ["theta", "rho", "near_caustic"],
                        [theta, field.rho, field.near_caustic])
    return {"outputs": [str(path)], "mass": field.mass()}


def cmd_hciz(cfg):
    if cfg["problem"] is None:
        prob = HCIZProblem(SpectralMeasure.point(0.0), SpectralMeasure.point(0.0))
    else:
        try:
            prob = HCIZProblem.from_json(_json_arg(cfg["problem"], "problem"))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError("problem", str(exc)) from exc
    x = parse_grid(cfg["grid"])
    t = parse_grid(cfg["tgrid"], "tgrid")
    if t[0] <= 0 or t[-1] >= 1:
        raise ConfigError("tgrid", "bridge times must lie strictly inside (0, 1)")
    fluid = euler_match_velocity(bridge_fluid(prob, x, t))
    deltas = [d for d in (0.005, 0.01, 0.02, 0.04) if t[0] <= d and 1 - d <= t[-1]]
    out = _out(cfg, "hciz")
    tt, xx = np.meshgrid(t, x, indexing="ij")
    paths = [io.write_csv(out / "fluid.csv", ["t", "x", "rho", "mu"], [tt, xx, fluid.rho, fluid.mu])]
    summary = {}
    if len(deltas) >= 2:
        act = action_evaluate(fluid, deltas)
        summary = {"log_coefficient": act.log_coefficient, "bulk_constant": act.bulk_constant}
        paths.append(io.write_json(out / "action.json", {
            "schema": io.SCHEMA, "s_of_delta": act.s_of_delta, **summary}))
    return {"outputs": [str(p) for p in paths], **summary}


def cmd_mc(cfg):
    spec = parse_ensemble(cfg["ensemble"])
    n = int(cfg["n"] or 256)
    seeds = int(cfg["seeds"] or 5)
    if seeds < 1:
        raise ConfigError("seeds", "must be positive")
    t = _positive_t(cfg, allow_zero=False)
    general = not spec.hermitian

    def one(rng):
        m = sample_ensemble(spec, n, t, rng)
        if m.kind == "general":
            rec = overlap_stats(m)
            return rec.eigenvalues, rec.o_diag
        return eigendecompose(m).astype(complex), np.ones(n)

    out = run_replicas(one, int(cfg["seed"]), seeds)
    eigs = np.concatenate([e for e, _ in out])
    cols = [np.repeat(np.arange(seeds), n), eigs.real, eigs.imag]
    header = ["replica", "re", "im"]
    if general:
        header.append("o_ii")
        cols.append(np.concatenate([o for _, o in out]))
    if isinstance(spec, GUE):
        ks = [ks_distance(e.real, semicircle_cdf(t)) for e, _ in out]
    elif isinstance(spec, Ginibre):
        ks = [ks_distance(np.abs(e), disk_radial_cdf(t)) for e, _ in out]
    else:
        ks = []
    path = io.write_csv(_out(cfg, "mc.csv"), header, cols)
    summary = {"outputs": [str(path)], "n": n, "seeds": seeds}
    if ks:
        summary["ks"] = float(np.median(ks))
    return summary


def cmd_validate(cfg):
    names = sorted(CASES) if cfg["case"] in (None, "all") else str(cfg["case"]).split(",")
    for name in names:
        if name not in CASES:
            raise ConfigError("case", f"unknown case {name!r}")
    out = _out(cfg, "validation")
    params = {"seed": int(cfg["seed"]), "n": cfg["n"], "seeds": cfg["seeds"]}
    results, paths = [], []
    for name in names:
        res = run_case(name, **params)
        results.append(res)
        paths.append(io.write_json(out / f"{name}.json", {"schema": io.SCHEMA, **res.summary()}))
        for fname, (header, cols) in res.tables.items():
            paths.append(io.write_csv(out / name / fname, header, cols))
    return {"outputs": [str(p) for p in paths],
            "cases": {r.name: r.passed for r in results},
            "passed": all(r.passed for r in results)}


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    start = time.perf_counter()
    try:
        cfg = resolve_config(sys.argv[1:] if argv is None else argv)
        summary = HANDLERS[cfg["command"]](cfg)
        status = 2 if summary.get("passed") is False else 0
        line = {"schema": io.SCHEMA, "command": cfg["command"], "status": status, **summary}
    except SystemExit as exc:
        return int(exc.code or 0)
    except ConfigError as exc:
        line = {"schema": io.SCHEMA, "status": 1, "error": "ConfigError", "field": exc.field,
                "message": str(exc)}
        status = 1
    except (EikonalError, ValueError, OSError) as exc:
        line = {"schema": io.SCHEMA, "status": 1, "error": type(exc).__name__,
                "message": str(exc)}
        status = 1
    line["runtime_ms"] = int(round(1000 * (time.perf_counter() - start)))
    print(io.json_text(line), flush=True)
    return status


if __name__ == "__main__":
    sys.exit(main())
