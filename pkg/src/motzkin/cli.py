"""Command-line interface: one binary, subcommands, machine-readable output.

Exit codes: 0 on success with all checks passing, 1 when a verification
or band check fails, 2 on usage errors.  Numeric text output uses 17
significant digits; JSON floats round-trip exactly.

Environment overrides: MOTZKIN_SEED (default seed when --seed is not
given) and MOTZKIN_WORKERS (default worker count).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import fluctuations, genfun, laplace, paths, sampling
from .errors import DomainError
from .grid import TimeGrid

__all__ = ["main", "run"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"environment variable {name} must be an integer, got {raw!r}")


def _default_workers() -> int:
    return _env_int("MOTZKIN_WORKERS", os.cpu_count() or 1)


def _default_seed() -> int:
    return _env_int("MOTZKIN_SEED", 0)


def _parse_grid(text: str) -> TimeGrid:
    items = [s for s in text.split(",") if s.strip()]
    return TimeGrid(tuple(item.strip() for item in items))


def _parse_floats(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


_MODE_ALIASES = {"cycle": "cycle_lemma", "dp": "dp_exact", "dplog": "dp_logspace"}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="motzkin", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="Motzkin or Catalan numbers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("motzkin", "catalan"), default="motzkin")

    p = sub.add_parser("enumerate", help="list all paths of length n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "jsonl"), default="text")

    p = sub.add_parser("sample", help="draw uniform random paths")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=tuple(_MODE_ALIASES), default="cycle")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("text", "jsonl"), default="text")

    p = sub.add_parser("verify-identities", help="run the analytic identity suites")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("sulanke", help="evaluate the level-weight polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--coeffs", action="store_true", help="also print the exact coefficients")

    p = sub.add_parser("laplace", help="evaluate Laplace transforms of block counts")
    p.add_argument("--n", type=int, default=None, help="path length (omit for the n -> oo limit)")
    p.add_argument("--grid", type=str, default="", help="comma-separated interior times")
    p.add_argument("--w", type=str, required=True, help="comma-separated block weights")
    p.add_argument("--z", type=str, default=None, help="comma-separated z weights (joint transform)")
    p.add_argument("--raw", action="store_true", help="uncentered level transform (needs --n)")

    p = sub.add_parser("density", help="evaluate reference densities")
    p.add_argument("--t", type=float, default=None, help="time of the semicircle-process marginal")
    p.add_argument("--x", type=str, required=True, help="evaluation point(s), comma-separated")
    p.add_argument("--grid", type=str, default=None, help="excursion grid times (excursion mode)")

    p = sub.add_parser("mc", help="Monte Carlo fluctuation experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--grid", type=str, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--mode", choices=tuple(_MODE_ALIASES), default="cycle")
    p.add_argument("--out", type=str, default=None, help="write the JSON report here")
    p.add_argument("--csv", type=str, default=None, help="write per-sample (F, G) rows here")
    return top


def _cmd_count(args) -> int:
    value = paths.catalan(args.n) if args.kind == "catalan" else paths.motzkin_number(args.n)
    print(value)
    return 0


def _cmd_enumerate(args) -> int:
    for path in paths.enumerate_paths(args.n):
        print(path.to_text() if args.format == "text" else path.to_json())
    return 0


def _cmd_sample(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    workers = args.workers if args.workers is not None else _default_workers()
    config = sampling.SamplerConfig(n=args.n, mode=_MODE_ALIASES[args.mode], seed=seed)
    for path in sampling.sample_paths(config, args.samples, workers=workers):
        print(path.to_text() if args.format == "text" else path.to_json())
    return 0


def _cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []

    def record(identity, n, err):
        rows.append({"identity": identity, "n": n, "max_rel_err": err, "pass": bool(err <= 1e-9)})

    for n in range(1, args.max_n + 1):
        worst = 0.0
        for _ in range(args.trials):
            u = rng.uniform(0.5, 2.0, size=n)
            a = genfun.level_pgf_enum(u)
            b = genfun.level_pgf(u)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
        record("level-pgf-quadrature", n, worst)

    for n in range(1, min(args.max_n, 8) + 1):
        worst = 0.0
        for _ in range(args.trials):
            t = np.sort(rng.uniform(0.5, 2.0, size=n))
            u = rng.uniform(0.5, 2.0, size=n)
            a = genfun.joint_pgf_paths(t, u)
            b = genfun.joint_pgf_moments(t, u)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
        record("joint-pgf-pairing-moments", n, worst)

    for n in range(0, min(args.max_n, 12) + 1):
        worst = 0.0
        for t in (0.3, 1.0, 2.7):
            vals = (
                genfun._sulanke_quadrature(n, t),
                genfun._sulanke_recurrence(n, t),
                genfun._sulanke_enum(n, t),
            )
            lo, hi = min(vals), max(vals)
            worst = max(worst, (hi - lo) / max(abs(hi), 1e-300))
        record("level-weight-three-routes", n, worst)

    print(json.dumps(rows, indent=2))
    return 0 if all(r["pass"] for r in rows) else 1


def _cmd_sulanke(args) -> int:
    value = genfun.sulanke_poly(args.n, args.t)
    if args.coeffs:
        print(json.dumps({"n": args.n, "t": args.t, "value": value,
                          "coeffs": genfun.sulanke_coeffs(args.n)}))
    else:
        print(_fmt(value))
    return 0


def _cmd_laplace(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else TimeGrid(())
    w = _parse_floats(args.w)
    if args.n is None:
        if args.z is None:
            raise DomainError("the limit transform needs --z")
        value = laplace.limit_laplace(grid, _parse_floats(args.z), w)
        kind = "limit"
    elif args.z is not None:
        value = laplace.laplace_joint(args.n, grid, _parse_floats(args.z), w)
        kind = "joint"
    elif args.raw:
        value = laplace.laplace_level_increments(args.n, grid, w)
        kind = "level-raw"
    else:
        value = laplace.laplace_level_fluctuations(args.n, grid, w)
        kind = "level-fluctuation"
    print(json.dumps({"kind": kind, "n": args.n, "grid": list(grid.times), "value": value}))
    return 0


def _cmd_density(args) -> int:
    from . import excursion, fbm

    xs = _parse_floats(args.x)
    if args.grid:
        grid = _parse_grid(args.grid)
        value = excursion.excursion_fdd_density(grid, xs)
        print(json.dumps({"kind": "excursion", "grid": list(grid.times), "x": xs, "value": value}))
    else:
        if args.t is None:
            raise DomainError("density needs either --grid (excursion) or --t (semicircle process)")
        value = fbm.fbm_density(args.t, xs[0])
        print(json.dumps({"kind": "semicircle-process", "t": args.t, "x": xs[0], "value": value}))
    return 0


def _cmd_mc(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    workers = args.workers if args.workers is not None else _default_workers()
    grid = _parse_grid(args.grid)
    report = fluctuations.mc_experiment(
        args.n, args.samples, grid, seed=seed, workers=workers, mode=_MODE_ALIASES[args.mode]
    )
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    if args.csv:
        _write_mc_csv(args, grid, seed, workers)
    return 0 if report.all_pass else 1


def _write_mc_csv(args, grid: TimeGrid, seed: int, workers: int) -> None:
    # re-sample the same stream layout and emit per-sample F and G columns
    import math as _math

    config = sampling.SamplerConfig(n=args.n, mode=_MODE_ALIASES[args.mode], seed=seed)
    steps = sampling.sample_steps(config, args.samples, workers=workers)
    ms = grid.indices(args.n)
    root = _math.sqrt(2.0 * args.n)
    with open(args.csv, "w") as fh:
        header = [f"F_{t}" for t in grid.times] + [f"G_{t}" for t in grid.times]
        fh.write(",".join(header) + "\n")
        asc = np.cumsum(steps == 1, axis=1)
        lev = np.cumsum(steps == 0, axis=1)
        for i in range(len(steps)):
            Fs = [(2 * asc[i, m - 1] + lev[i, m - 1] - m) / root if m else 0.0 for m in ms]
            Gs = [(3 * lev[i, m - 1] - m) / root if m else 0.0 for m in ms]
            fh.write(",".join(_fmt(v) for v in Fs + Gs) + "\n")


_COMMANDS = {
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "sample": _cmd_sample,
    "verify-identities": _cmd_verify,
    "sulanke": _cmd_sulanke,
    "laplace": _cmd_laplace,
    "density": _cmd_density,
    "mc": _cmd_mc,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
