"""Command-line entry point: ``gyrofp <subcommand> CONFIG``.

Exit status: 0 on success, 1 when a monitor or convergence check fails, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import RunConfig, load_config
from .diagnostics import check_apriori
from .io import SnapshotError, read_series, write_series, write_snapshot
from .solver import ConfigurationError

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_MONITOR = 1
EXIT_USAGE = 2

log = logging.getLogger("gyrofp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gyrofp", description="Gyro-averaged Fokker-Planck runs and checks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="INI configuration file")
        p.add_argument("-o", "--output-dir", help="override [run] output_dir")
        p.add_argument("--t-end", type=float, help="override [time] t_end")
        return p

    add("run", "self-consistent nonlinear run")
    add("frozen", "run with the fixed potential of [run] frozen_phi")
    add("harness", "four-dimensional gyro-coordinate run at [harness] epsilon")
    add("sweep", "epsilon sweep against the limit model")
    add("stability", "two-trajectory stability experiment over [run] deltas")
    chk = add("check", "re-run the a-priori monitors on a saved series")
    chk.add_argument("--series", help="CSV series (default OUTPUT_DIR/series.csv)")
    return parser


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(config: RunConfig, frozen: bool) -> int:
    from .runner import run

    mode = "frozen_phi" if frozen else "nonlinear"
    result = run(replace(config, mode=mode))
    out = _output_dir(config)
    write_series(result.series, out / "series.csv")
    write_snapshot(result.state, out / "final.gyrofp")
    if result.status == "blow_up":
        write_snapshot(result.last_valid, out / "last_valid.gyrofp")
        print(f"blow-up detected; last valid state at t={result.last_valid.time:.6g} saved")
    print(f"status: {result.status}, records: {len(result.series)}, t={result.state.time:.6g}")
    print(result.report.summary())
    return EXIT_OK if result.ok else EXIT_MONITOR


def _cmd_check(config: RunConfig, series_path: str | None) -> int:
    path = Path(series_path) if series_path else Path(config.output_dir) / "series.csv"
    try:
        series = read_series(path)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot read series {path}: {exc}") from exc
    if not series:
        raise ConfigurationError(f"series {path} has no records")
    report = check_apriori(series, config.params, config.slack, config.monitors)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_MONITOR


def _cmd_harness(config: RunConfig) -> int:
    from .harness import run_harness

    state, records = run_harness(config.params, config.t_end, config.harness, config.record_interval)
    out = _output_dir(config)
    with open(out / "harness.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "mass", "average_norm", "harmonic1_norm"])
        for r in records:
            writer.writerow([repr(r.t), repr(r.mass), repr(r.average_norm), repr(r.harmonic1_norm)])
    drift = abs(records[-1].mass - records[0].mass) / abs(records[0].mass)
    print(f"epsilon={config.harness.epsilon:g} steps={state.step_count} relative mass drift={drift:.2e}")
    for r in records:
        print(f"t={r.t:10.5f}  |<g>|={r.average_norm:.6e}  |g_1|={r.harmonic1_norm:.6e}")
    return EXIT_OK


def _cmd_sweep(config: RunConfig) -> int:
    from .harness import epsilon_sweep

    report = epsilon_sweep(config.params, config.t_end, config.harness)
    text = report.table()
    (_output_dir(config) / "sweep.txt").write_text(text + "\n")
    print(text)
    return EXIT_OK if report.converged else EXIT_MONITOR


def _cmd_stability(config: RunConfig) -> int:
    from .runner import stability_experiment

    report = stability_experiment(config)
    out = _output_dir(config)
    with open(out / "stability.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta", "t", "distance_2m"])
        for tr in report.traces:
            for t, s in zip(tr.times, tr.distance):
                writer.writerow([repr(tr.delta), repr(t), repr(s)])
    print(report.summary())
    return EXIT_OK if report.monotone else EXIT_MONITOR


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if args.output_dir:
            config = replace(config, output_dir=args.output_dir)
        if args.t_end is not None:
            config = replace(config, t_end=args.t_end)
        if args.command == "run":
            return _cmd_run(config, frozen=False)
        if args.command == "frozen":
            return _cmd_run(config, frozen=True)
        if args.command == "check":
            return _cmd_check(config, args.series)
        if args.command == "harness":
            return _cmd_harness(config)
        if args.command == "sweep":
            return _cmd_sweep(config)
        return _cmd_stability(config)
    except (ConfigurationError, SnapshotError) as exc:
        parser.print_usage(sys.stderr)
        print(f"gyrofp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
