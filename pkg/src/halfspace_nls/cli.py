"""Command-line entry point: ``halfspace-nls <command> [flags]``.

Commands: oned, verify, ground-state, solve, threshold-scan.  Every command
writes ``report.json`` into ``--out`` (plus CSV tables) and echoes the
effective configuration into it.  Precedence is flags > ``--config`` file >
built-in defaults.

Exit codes: 0 success, 1 invalid parameters, 2 verification or
certification failure, 3 solver non-convergence, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import closed_form as cf
from .energy import (
    coercivity_constant,
    decomposition_check,
    energy,
    gradient,
    lower_energy_bound,
)
from .errors import ConvergenceError, GeometryError, ParameterError
from .grid import Field, Grid2D, inner, write_binary, write_csv
from .ground_state import (
    decay_slope,
    energy_direct,
    ground_level,
    nehari_defect,
    radial_ground_state,
)
from .mountain_pass import solve_on_grid, wider_grid_check
from .nonlinearity import (
    NonlinearityCtx,
    verify_elementary_inequality,
    verify_growth_bounds,
)

EXIT_OK, EXIT_PARAMS, EXIT_VERIFY, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4

DEFAULTS = {
    "p": [3.0],
    "c": [1.0],
    "r": 10.0,
    "Lx": 24.0,
    "Ly": 24.0,
    "h": 0.125,
    "N": 2,
    "tol_grad": 1e-10,
    "tol_pde": 1e-4,
    "out": "out",
    "seed": 0,
    "solve_2d": False,
    "wide_extra": 8.0,
    "level_tol": 1e-3,
}
SCAN_C = [0.2, 0.6, 1.0, 1.4, 1.42, 1.5]
QS = (2.5, 3.0, 4.0)

log = logging.getLogger("halfspace_nls")


class UsageError(Exception):
    pass


def _floats(text):
    return [float(x) for x in str(text).replace(",", " ").split()]


_CONVERT = {
    "p": _floats,
    "c": _floats,
    "r": float,
    "Lx": float,
    "Ly": float,
    "h": float,
    "N": int,
    "tol_grad": float,
    "tol_pde": float,
    "out": str,
    "seed": int,
    "solve_2d": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"),
    "wide_extra": float,
    "level_tol": float,
}
_ALIASES = {k.lower().replace("_", "-"): k for k in _CONVERT}


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        name = _ALIASES.get(key.lower().replace("_", "-"))
        if name is None:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[name] = _CONVERT[name](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    add("--p", type=float, nargs="+", help="exponent(s) p > 1")
    add("--c", type=float, nargs="+", help="boundary value(s) c > 0")
    add("--r", type=float, help="bump distance from the boundary")
    add("--Lx", type=float, help="half-width of the computational strip")
    add("--Ly", type=float, help="height of the computational strip")
    add("--h", type=float, help="mesh spacing")
    add("--N", type=int, help="dimension for ground-state (1 or 2)")
    add("--tol-grad", dest="tol_grad", type=float, help="dual-norm gradient tolerance")
    add("--tol-pde", dest="tol_pde", type=float, help="sup-norm PDE residual tolerance")
    add("--out", help="output directory")
    add("--seed", type=int, help="seed for randomized checks")
    add("--config", help="key = value file")
    add("--solve-2d", dest="solve_2d", action="store_const", const=True,
        help="threshold-scan: also run the 2D solver below c_p")
    add("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="halfspace-nls", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("oned", "classify the 1D problem and tabulate its profiles"),
        ("verify", "sample the nonlinearity inequalities and energy identities"),
        ("ground-state", "radial ground state and its level b_inf"),
        ("solve", "mountain-pass solve of the half-plane problem"),
        ("threshold-scan", "classification across a range of c"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def effective_config(args):
    cfg = dict(DEFAULTS)
    if args.command == "threshold-scan":
        cfg["c"] = list(SCAN_C)
    if args.command == "verify":
        cfg["p"] = [1.5, 2.0, 3.0, 5.0]
        cfg["c"] = None
    if args.config:
        cfg.update(read_config(args.config))
    for key in _CONVERT:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    return cfg


def _single(cfg, key):
    values = cfg[key]
    if len(values) != 1:
        raise UsageError(f"--{key} takes one value for {cfg['command']}")
    return values[0]


def _params(p, c):
    try:
        return cf.Params(p, c)
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc


def _require_subthreshold(p, c):
    params = _params(p, c)
    _, flag = cf.first_integral_criterion(c, p)
    if flag is cf.Trichotomy.NO_SOLUTION:
        raise UsageError(str(cf.ThresholdError(c, p, params.c_p)))
    if flag is cf.Trichotomy.ONE_SOLUTION:
        raise UsageError(f"c = c_p = {params.c_p:.12g}: unsupported regime for the 2D solver")
    return params


def _grid(cfg):
    try:
        return Grid2D(cfg["Lx"], cfg["Ly"], cfg["h"])
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc


def _write_json(out, payload):
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _clean(obj):
    """Turn NaN/inf into strings so the JSON stays standard."""
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def cmd_oned(cfg):
    p, c = _single(cfg, "p"), _single(cfg, "c")
    params = _params(p, c)
    value, flag = cf.first_integral_criterion(c, p)
    report = {"p": p, "c": c, "c_p": params.c_p, "I": value, "class": flag.name,
              "solutions": flag.value}
    out = Path(cfg["out"])
    if flag is not cf.Trichotomy.NO_SOLUTION:
        prof = cf.profiles(c, p)
        report.update(t_shift=prof.t_shift, m1=prof.m1, m2=prof.m2)
        s = np.linspace(0.0, 20.0, 401)
        (out / "fields").mkdir(parents=True, exist_ok=True)
        np.savetxt(out / "fields" / "profiles.csv",
                   np.column_stack([s, prof.u_c(s), prof.u_c_tilde(s)]),
                   delimiter=",", header="s,z_c,z_tilde_c", comments="", fmt="%.17g")
    return report, EXIT_OK


def _gradient_checks(ctx, rng, pairs=20, eps=1e-5):
    grid = Grid2D(4.0, 4.0, 0.25)
    X1, X2 = grid.mesh()
    envelope = np.exp(-0.25 * (X1**2 + (X2 - 2.0) ** 2))
    worst = 0.0
    for _ in range(pairs):
        u = Field(grid, rng.normal(size=grid.shape) * envelope)
        phi = Field(grid, rng.normal(size=grid.shape) * envelope)
        fd = (energy(u + eps * phi, ctx) - energy(u - eps * phi, ctx)) / (2 * eps)
        an = inner(gradient(u, ctx), phi)
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-300))
    return worst


def _decomposition_margin(ctx, grid, rng, samples=5):
    worst = 0.0
    for _ in range(samples):
        u = Field(grid, np.abs(rng.normal(size=grid.shape)))
        worst = max(worst, decomposition_check(u, ctx) / (1 + abs(energy(u, ctx))))
    return worst


def cmd_verify(cfg):
    rng = np.random.default_rng(cfg["seed"])
    grid = _grid(cfg)
    contexts = []
    for p in cfg["p"]:
        cs = cfg["c"] or [0.5 * cf.critical_threshold(p), 0.9 * cf.critical_threshold(p)]
        for c in cs:
            _require_subthreshold(p, c)
            contexts.append(NonlinearityCtx(p, c))
    reports = [verify_elementary_inequality(q).to_dict() for q in QS]
    checks = []
    for ctx in contexts:
        reports += [r.to_dict() for r in verify_growth_bounds(ctx)]
        lam = coercivity_constant(grid, ctx)
        grad_err = _gradient_checks(ctx, rng)
        decomp = _decomposition_margin(ctx, grid, rng)
        cor_margin = min(
            energy(u, ctx) - lower_energy_bound(u, ctx, lam)
            for u in (Field(grid, rng.normal(size=grid.shape) * s) for s in (0.05, 0.2, 1.0))
        )
        checks.append({
            "p": ctx.p, "c": ctx.c, "coercivity": lam,
            "gradient_rel_error": grad_err, "decomposition_margin": decomp,
            "lower_bound_margin": cor_margin,
            "pass": bool(lam > 0 and grad_err < 1e-6 and decomp < 1e-10 and cor_margin >= 0),
        })
    failing = [r["id"] for r in reports if not r["pass"]]
    failing += [f"checks[p={c['p']:g},c={c['c']:.6g}]" for c in checks if not c["pass"]]
    report = {"inequalities": reports, "checks": checks, "failing": failing,
              "pass": not failing}
    if failing:
        print(f"verification failed: {failing[0]}", file=sys.stderr)
    return report, EXIT_OK if not failing else EXIT_VERIFY


def cmd_ground_state(cfg):
    p = _single(cfg, "p")
    _params(p, 1.0)
    if cfg["N"] not in (1, 2):
        raise UsageError("--N must be 1 or 2")
    gs = radial_ground_state(p, cfg["N"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    gs.to_csv(out / "radial.csv")
    report = {"p": p, "N": gs.N, "psi0": gs.psi0, "b_inf": ground_level(gs),
              "E_inf_direct": energy_direct(gs), "nehari_defect": nehari_defect(gs),
              "decay_slope": decay_slope(gs), "C_fit": gs.C_fit, "rho_cut": gs.rho_cut,
              "R_max": gs.R_max, "drho": gs.drho}
    return report, EXIT_OK


def _solve_one(p, c, cfg, grid, gs=None):
    _require_subthreshold(p, c)
    ctx = NonlinearityCtx(p, c, discrete_profile=True)
    gs = gs or radial_ground_state(p, 2)
    b_inf = ground_level(gs)
    result = solve_on_grid(ctx, gs, grid, cfg["r"], b_inf, tol_grad=cfg["tol_grad"],
                           tol_pde=cfg["tol_pde"], params={"p": p, "c": c, "r": cfg["r"]})
    wide_level, wide_grad = wider_grid_check(result, ctx, extra=cfg["wide_extra"],
                                             tol_grad=cfg["tol_grad"])
    drift = abs(wide_level - result.energy_level)
    result.diagnostics.update(wide_grid_level=wide_level, wide_grid_grad=wide_grad,
                              wide_grid_drift=drift)
    if not drift < cfg["level_tol"]:
        result.failures.append(f"wider-grid level drift {drift:.3e} >= {cfg['level_tol']:g}")
        result.certified = False
    return result


def cmd_solve(cfg):
    p, c = _single(cfg, "p"), _single(cfg, "c")
    grid = _grid(cfg)
    result = _solve_one(p, c, cfg, grid)
    out = Path(cfg["out"])
    write_csv(result.u_star, out / "fields" / "u_star.csv")
    write_csv(result.v, out / "fields" / "v.csv")
    write_binary(result.u_star, out / "fields" / "u_star.bin")
    report = result.to_dict()
    if not result.certified:
        print("uncertified: " + "; ".join(result.failures), file=sys.stderr)
    return report, EXIT_OK if result.certified else EXIT_VERIFY


def cmd_threshold_scan(cfg):
    p = _single(cfg, "p")
    cp = cf.critical_threshold(p)
    rows = []
    grid = _grid(cfg) if cfg["solve_2d"] else None
    gs = radial_ground_state(p, 2) if cfg["solve_2d"] else None
    for c in cfg["c"]:
        _params(p, c)
        if not c < 2 * cp:
            raise UsageError(f"scan value c = {c:g} outside (0, 2 c_p)")
        value, flag = cf.first_integral_criterion(c, p)
        row = {"c": c, "I": value, "class": flag.value, "certified": "", "level": ""}
        if cfg["solve_2d"]:
            if flag is cf.Trichotomy.TWO_SOLUTIONS:
                res = _solve_one(p, c, cfg, grid, gs)
                row.update(certified=res.certified, level=res.energy_level)
            else:
                row.update(certified="unsupported")
        rows.append(row)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scan.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["c", "I", "class", "certified", "level"])
        writer.writeheader()
        writer.writerows(rows)
    below = [r for r in rows if r["c"] < cp]
    above = [r for r in rows if r["c"] > cp]
    consistent = all(r["class"] == 2 for r in below) and all(r["class"] == 0 for r in above)
    report = {"p": p, "c_p": cp, "rows": rows, "consistent": consistent}
    return report, EXIT_OK if consistent else EXIT_VERIFY


COMMANDS = {
    "oned": cmd_oned,
    "verify": cmd_verify,
    "ground-state": cmd_ground_state,
    "solve": cmd_solve,
    "threshold-scan": cmd_threshold_scan,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = effective_config(args)
        report, code = COMMANDS[args.command](cfg)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (ConvergenceError, GeometryError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _write_json(Path(cfg["out"]), _clean({"config": cfg, "result": report}))
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
