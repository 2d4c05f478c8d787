"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (bad config, failed check),
2 numerical blow-up (records up to the failure are still written).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from ..constitutive import jacobian_fd_error, margin_sweep
from ..grid import make_grid
from ..stepper import BlowUpError, SimState, run
from ..uniqueness import DIRECTIONS, gronwall_study, perturbation_direction, uniqueness_experiment
from .checks import oracle_errors
from .config import RunConfig, load_config
from .persistence import read_snapshot, truncate_records, write_records, write_snapshot

EXIT_OK, EXIT_INVALID, EXIT_BLOWUP = 0, 1, 2

logger = logging.getLogger("gsgf")


def _snapshot_writer(cfg: RunConfig, out: Path):
    def save(state: SimState, name: str) -> None:
        write_snapshot(state, out / name, alpha1=cfg.alpha1, mu0=cfg.mu0, mu1=cfg.mu1, r=cfg.r)
    return save


def cmd_run(cfg: RunConfig, args) -> int:
    params = cfg.to_params()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save = _snapshot_writer(cfg, out)
    start = None
    if args.resume:
        start = read_snapshot(args.resume, params.grid)
        truncate_records(cfg.records_path, start.t)

    def on_snapshot(state: SimState) -> None:
        save(state, f"snapshot_{round(state.t / params.dt):08d}.gsgf")

    def flush(records) -> None:
        # a resumed run's first record repeats the snapshot row already on disk
        write_records(records[1:] if start is not None else records, cfg.records_path,
                      append=start is not None)

    try:
        result = run(params, start=start, snapshot_every=cfg.snapshot_every, on_snapshot=on_snapshot)
    except BlowUpError as exc:
        flush(exc.records or [])
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    flush(result.records)
    save(result.state, "final.gsgf")
    last = result.records[-1]
    print(f"t = {last.t:.6g}  E = {last.E:.6e}  steps = {params.steps}  dt = {params.dt:.6g}")
    return EXIT_OK


def cmd_verify_constitutive(cfg: RunConfig, args) -> int:
    report = margin_sweep(cfg.law, samples=args.samples, d=cfg.dim, seed=cfg.seed)
    for name, value in report.minima.items():
        print(f"{name:16s} min scaled margin {value: .3e}")
    fd = jacobian_fd_error(cfg.law, samples=min(args.samples, 1000), d=cfg.dim, seed=cfg.seed + 1)
    print(f"{'jacobian_fd':16s} max relative error {fd:.3e}")
    ok = report.passed and fd < 1e-6
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_uniqueness(cfg: RunConfig, args) -> int:
    params = cfg.to_params()
    direction = perturbation_direction(params, args.direction)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.delta == 0:
            rec = uniqueness_experiment(params, 0.0, direction)
            print(f"delta = 0: max W = {rec.W.max():.3e}, bitwise equal = {rec.bitwise_equal}")
            ok, records = rec.bitwise_equal and rec.W.max() == 0.0, [rec]
        else:
            report = gronwall_study(params, args.delta, direction)
            print(f"c = {report.c:.6e}  c(delta/2) = {report.c_half:.6e}  stability = {report.stability:.2e}")
            print(f"envelope excess = {report.envelope_excess:.3e}  sqrt W ratio = {report.sqrt_w_ratio:.6f}")
            ok, records = report.passed(), report.records
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    with open(out / "uniqueness.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("delta", "t", "W", "F", "int_F"))
        for rec in records:
            for row in zip(rec.t, rec.W, rec.F, rec.int_F):
                writer.writerow([repr(rec.delta)] + [repr(float(x)) for x in row])
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_check(cfg: RunConfig, args) -> int:
    grid = make_grid(cfg.dim, args.n)
    errors = oracle_errors(grid, samples=args.samples, seed=cfg.seed)
    for name, err in errors.items():
        print(f"{name:12s} max relative error {err:.3e}")
    ok = all(err < 1e-11 for err in errors.values())
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsgf", description="Spectral simulator for shear-thickening second-grade fluids.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configuration and write records/snapshots")
    p.add_argument("config")
    p.add_argument("--resume", metavar="SNAPSHOT", help="continue from a snapshot file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-constitutive", help="random sweep of the stress inequalities")
    p.add_argument("config")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_verify_constitutive)

    p = sub.add_parser("uniqueness", help="twin-run perturbation growth experiment")
    p.add_argument("config")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--direction", choices=DIRECTIONS, default="random")
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("check", help="compare spectral operators with dense oracles")
    p.add_argument("config")
    p.add_argument("--n", type=int, default=8, help="oracle grid size (<= 16)")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which would read as a blow-up
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if getattr(args, "delta", 0) < 0:
            raise ValueError("--delta must be nonnegative")
        return args.func(cfg, args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
