"""Command line shell: verify, simulate, barrier, monitor.

Exit statuses: 0 success, 2 usage or configuration error, 3 blow-up
detected, 4 internal numerical fault.  CSV headers are fixed; any field
reordering requires a schema-version bump in the header row.
"""

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .checks import CHECK_NAMES, default_reports, hard_checks_pass, write_reports_csv
from .config import ConfigError, RunConfig, load_config
from .series import BarrierConfig, SeriesMonitor, SeriesParams, barrier_ode
from .solver import EnergyMonitor, SolverConfig, beltrami_state, run
from .spectral import Grid, RealnessError, inverse_transform, SpectralField

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BLOWUP = 3
EXIT_NUMERICAL = 4

ENERGY_COLUMNS = ("time", "l2_sq", "grad_sq", "l4")
SERIES_COLUMNS = ("time", "series_Bk_total", "series_Bk_low", "series_Bk_high",
                  "series_Bhat_low", "sup_estimate", "gronwall_ratio",
                  "truncation_flag")
BARRIER_COLUMNS = ("time", "value")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def cmd_verify(args) -> int:
    names = None
    if args.checks and args.checks != "all":
        names = [part.strip() for part in args.checks.split(",") if part.strip()]
    try:
        reports = default_reports(seed=args.seed, n=args.n,
                                  samples=args.samples, names=names)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RealnessError, FloatingPointError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "checks.csv"
    write_reports_csv(reports, csv_path)
    for rep in reports:
        tag = "pass" if rep.passed else "FAIL"
        hard = "hard" if rep.metadata.get("hard") == 1.0 else "info"
        print(f"{rep.check_name:16s} {tag:4s} [{hard}] "
              f"measured={rep.measured_max_ratio:.6g} "
              f"threshold={rep.threshold:.6g} samples={rep.samples}")
    print(f"wrote {csv_path}")
    return EXIT_OK if hard_checks_pass(reports) else 1


def _attach_series(cfg: RunConfig, force: bool):
    if cfg.series is None and not force:
        return None
    params = cfg.series if cfg.series is not None else SeriesParams()
    return SeriesMonitor(params, t_final=cfg.solver.t_end,
                         cadence=cfg.series_cadence)


def _beltrami_report(cfg: SolverConfig, state) -> float:
    """Max-norm error of the final state against the exact decay."""
    lam = cfg.initial.lam
    ref = beltrami_state(state.grid, cfg.nu, lam, cfg.initial.amplitude)
    decay = math.exp(-cfg.nu * (2.0 * math.pi * lam) ** 2 * state.time)
    worst = 0.0
    for got, ref_c in zip(state.components, ref.components):
        diff = inverse_transform(SpectralField(state.grid, got)).values \
            - decay * inverse_transform(SpectralField(state.grid, ref_c)).values
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def cmd_simulate(args, force_series: bool = False) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    solver_cfg = cfg.solver
    out_dir = Path(args.out) if args.out else Path(solver_cfg.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    if solver_cfg.checkpoint_interval is not None:
        solver_cfg = replace(solver_cfg, out_dir=str(out_dir))

    monitors = [EnergyMonitor(cadence=0.0)]
    series_mon = _attach_series(cfg, force_series)
    if series_mon is not None:
        monitors.append(series_mon)

    try:
        result = run(solver_cfg, monitors=monitors)
    except (RealnessError, FloatingPointError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _write_rows(out_dir / cfg.csv_names["energy"], ENERGY_COLUMNS,
                result.monitor_rows["energy"])
    if series_mon is not None:
        _write_rows(out_dir / cfg.csv_names["series"], SERIES_COLUMNS,
                    result.monitor_rows["series"])

    if result.blown_up:
        print(f"blow-up detected at t={result.blow_up_time:.6g}; "
              f"partial outputs kept in {out_dir}")
        return EXIT_BLOWUP

    state = result.state
    print(f"finished at t={state.time:.6g} on n={state.grid.n}, "
          f"wrote {out_dir / cfg.csv_names['energy']}")
    if solver_cfg.initial.kind == "beltrami":
        err = _beltrami_report(solver_cfg, state)
        print(f"beltrami closed-form error: {err:.6e}")
    return EXIT_OK


def cmd_barrier(args) -> int:
    try:
        cfg = BarrierConfig(epsilon=args.epsilon, script_b=args.script_b,
                            m_power=args.m_power, t_final=args.t_final)
        result = barrier_ode(cfg, dt=args.dt)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "barrier.csv"
    rows = [{"time": float(t), "value": float(v)}
            for t, v in zip(result.times, result.values)]
    _write_rows(csv_path, BARRIER_COLUMNS, rows)
    print(f"verdict: {result.verdict} margin={result.margin:.6g} "
          f"ceiling={result.ceiling:.6g} threshold={result.threshold:.6g}")
    print(f"wrote {csv_path}")
    if result.blown_up:
        return EXIT_BLOWUP
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpns",
        description="dyadic-band diagnostics and viscous flow runs on the unit box")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the inequality checks")
    p_verify.add_argument("--checks", default="all",
                          help=f"comma list from: {', '.join(CHECK_NAMES)} (or: all)")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--n", type=int, default=32)
    p_verify.add_argument("--samples", type=int, default=20)
    p_verify.add_argument("--out", default="out")
    p_verify.set_defaults(func=cmd_verify)

    for name, forced in (("simulate", False), ("monitor", True)):
        p = sub.add_parser(name, help="march a configured run"
                           + (" with the series monitor on" if forced else ""))
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None,
                       help="override the configured output directory")
        p.set_defaults(func=lambda a, f=forced: cmd_simulate(a, force_series=f))

    p_barrier = sub.add_parser("barrier", help="integrate the scalar barrier inequality")
    p_barrier.add_argument("--epsilon", type=float, required=True)
    p_barrier.add_argument("--script-b", type=float, required=True,
                           help="bound on the time integral of the rate")
    p_barrier.add_argument("--m-power", type=float, required=True)
    p_barrier.add_argument("--t-final", type=float, default=1.0)
    p_barrier.add_argument("--dt", type=float, default=1e-3)
    p_barrier.add_argument("--out", default="out")
    p_barrier.set_defaults(func=cmd_barrier)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
