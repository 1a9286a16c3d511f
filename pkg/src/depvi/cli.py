"""``sim`` command-line front end.

    sim run    [--config PATH] [--map cayley|exp] [--h X] [--T X] [--output PATH] [--stride N]
    sim verify [--quick] [--seed N]
    sim order  [--h-list a,b,c] [--T X] [--config PATH] [--map cayley|exp]

Exit codes: 0 success, 1 numerical failure (solver failure, failed check,
order below threshold), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checks
from .config import W_B_INTERPRETATION, ConfigError, SimConfig, load_config
from .simulation import SimulationError, convergence_study, run_discrete

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

MIN_ORDER = 0.8
EXACT_TOL = 1e-13
DEFAULT_H_LIST = (0.02, 0.01, 0.005)

CSV_COLUMNS = [
    "t",
    *(f"{name}_{axis}" for name in ("omega", "nu", "n", "a", "q") for axis in "xyz"),
    "E",
    "I_kn",
    "rot_drift",
    "a_norm_err",
]


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    # %-formatting ignores the locale, so the decimal point is always "."
    return "%.17g" % x


def format_csv(records) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        values = [rec.t, *rec.omega, *rec.nu, *rec.n, *rec.a, *rec.q, rec.E, rec.I_kn, rec.rot_drift, rec.a_norm_err]
        lines.append(",".join(_fmt(float(v)) for v in values))
    return "\n".join(lines) + "\n"


def summary_dict(cfg: SimConfig, summary) -> dict:
    return {
        "map": cfg.tau_map().name,
        "h": cfg.h,
        "T": cfg.T,
        "steps": summary.steps,
        "record_stride": cfg.record_stride,
        "solver_tolerance": cfg.tolerance,
        "max_rel_energy_err": summary.max_rel_energy_err,
        "max_rel_kn_err": summary.max_rel_kn_err,
        "max_abs_energy_err": summary.max_abs_energy_err,
        "max_abs_kn_err": summary.max_abs_kn_err,
        "max_rot_drift": summary.max_rot_drift,
        "max_a_norm_err": summary.max_a_norm_err,
        "E0": summary.E0,
        "I0": summary.I0,
        "solver_iter_histogram": {str(k): v for k, v in summary.solver_iter_histogram.items()},
        "w_b_interpretation": W_B_INTERPRETATION,
    }


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load(path) -> SimConfig:
    if path is None:
        return SimConfig()
    try:
        return load_config(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except ConfigError as exc:
        raise UsageError(f"invalid config {path}: {exc}") from None


def _override(cfg: SimConfig, **kwargs) -> SimConfig:
    try:
        return cfg.with_overrides(**kwargs)
    except ConfigError as exc:
        raise UsageError(f"invalid option: {exc}") from None


# --- subcommands ------------------------------------------------------------


def cmd_run(args) -> int:
    cfg = _override(_load(args.config), map=args.map, h=args.h, T=args.T, output=args.output, record_stride=args.stride)
    try:
        result = run_discrete(
            cfg.vehicle_params(),
            cfg.initial_state(),
            cfg.tau_map(),
            cfg.h,
            cfg.T,
            cfg.solver_config(),
            record_stride=cfg.record_stride,
        )
    except SimulationError as exc:
        print(f"error: solver failed at step {exc.step}: {exc.cause}", file=sys.stderr)
        return EXIT_FAILURE

    csv_path = Path(f"{cfg.output}.csv")
    json_path = Path(f"{cfg.output}.summary.json")
    try:
        _write(csv_path, format_csv(result.records))
        _write(json_path, json.dumps(summary_dict(cfg, result.summary), indent=2) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write output: {exc}") from None

    s = result.summary
    print(f"map={cfg.tau_map().name} h={cfg.h:g} T={cfg.T:g} steps={s.steps}")
    print(f"max_rel_energy_err={s.max_rel_energy_err:.3e} max_rel_kn_err={s.max_rel_kn_err:.3e}")
    print(f"max_rot_drift={s.max_rot_drift:.3e} max_a_norm_err={s.max_a_norm_err:.3e}")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    samples = 100 if args.quick else 1000
    results = checks.run_battery(samples=samples, seed=args.seed)
    width = max(len(r.name) for r in results)
    print(f"{'property':<{width}}  {'samples':>7}  {'max error':>10}  {'tolerance':>9}  result")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {r.samples:>7}  {r.max_error:>10.3e}  {r.tolerance:>9.0e}  {status}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"all {len(results)} properties passed (seed {args.seed})")
    return EXIT_OK


def _parse_h_list(text: str) -> list:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"--h-list must be comma-separated numbers, got {text!r}") from None
    if len(values) < 2:
        raise UsageError("--h-list needs at least two step sizes")
    if any(not h > 0.0 for h in values):
        raise UsageError("--h-list entries must be > 0")
    return sorted(values, reverse=True)


def cmd_order(args) -> int:
    h_list = _parse_h_list(args.h_list) if args.h_list is not None else list(DEFAULT_H_LIST)
    cfg = _override(_load(args.config), map=args.map)
    try:
        table = convergence_study(
            cfg.vehicle_params(), cfg.initial_state(), cfg.tau_map(), args.T, h_list, cfg.solver_config()
        )
    except SimulationError as exc:
        print(f"error: solver failed at step {exc.step}: {exc.cause}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    print(f"map={cfg.tau_map().name} T={table.T:g} h_ref={table.h_ref:g} (RK4)")
    print(f"{'h':>10}  {'error':>12}  order")
    orders = [None, *table.orders]
    for row, order in zip(table.rows, orders):
        shown = "" if order is None else f"{order:.3f}"
        print(f"{row.h:>10g}  {row.error:>12.4e}  {shown}")
    if table.max_error <= EXACT_TOL:
        print("observed order: exact")
        return EXIT_OK
    observed = table.observed_order
    if observed is None:
        print("observed order: undefined (some errors are zero)", file=sys.stderr)
        return EXIT_FAILURE
    print(f"observed order: {observed:.3f}")
    if observed < MIN_ORDER:
        print(f"error: observed order {observed:.3f} is below {MIN_ORDER}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Variational integrator for an underwater vehicle.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a trajectory and write CSV and JSON output")
    run.add_argument("--config", help="configuration file (defaults are used when omitted)")
    run.add_argument("--map", choices=["cayley", "exp"])
    run.add_argument("--h", type=float, help="time step in seconds")
    run.add_argument("--T", type=float, help="final time in seconds")
    run.add_argument("--output", help="output path prefix")
    run.add_argument("--stride", type=int, help="record every N-th step")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="run the randomized identity battery")
    verify.add_argument("--quick", action="store_true", help="100 samples per property instead of 1000")
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=cmd_verify)

    order = sub.add_parser("order", help="convergence study against an RK4 reference")
    order.add_argument("--h-list", help="comma-separated step sizes (default 0.02,0.01,0.005)")
    order.add_argument("--T", type=float, default=1.0)
    order.add_argument("--config")
    order.add_argument("--map", choices=["cayley", "exp"])
    order.set_defaults(func=cmd_order)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
