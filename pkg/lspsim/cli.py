"""
Command-line entry point: ``lspsim run|check|sweep|plot``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import pandas as pd

from lspsim.conf import configure_logging, settings
from lspsim.errors import EXIT_OK, ConfigError, LspSimError, OutputError, SignalingError, exit_code_for
from lspsim.scenario import emit_packets_csv, emit_summary, emit_trace, load_scenario
from lspsim.scenario.report import records_frame
from lspsim.scenario.runner import Simulation

logger = logging.getLogger(__name__)


def _seed_range(text: str) -> range:
    first, sep, last = text.partition("-")
    try:
        start = int(first)
        stop = int(last) if sep else start
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A-B, got {text!r}") from None
    if start < 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty or negative seed range {text!r}")
    return range(start, stop + 1)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lspsim", description="MPLS fast reroute network simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario and write its results")
    run.add_argument("scenario", type=Path)
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--out-dir", type=Path, help="result directory (default: settings.OUTPUT_DIR)")
    run.add_argument("--csv", action="store_true", help="write packets.csv")
    run.add_argument("--summary", action="store_true", help="write summary.txt")
    run.add_argument("--trace", action="store_true", help="write the event trace")
    run.add_argument("--plot", action="store_true", help="write delay and jitter figures")
    run.set_defaults(handler=cmd_run)

    check = commands.add_parser("check", help="validate a scenario without running it")
    check.add_argument("scenario", type=Path)
    check.set_defaults(handler=cmd_check)

    sweep = commands.add_parser("sweep", help="run a scenario once per seed")
    sweep.add_argument("scenario", type=Path)
    sweep.add_argument("--seeds", type=_seed_range, required=True, metavar="A-B")
    sweep.add_argument("--end", type=_positive_float, help="override the simulated end time")
    sweep.add_argument("--out-dir", type=Path)
    sweep.set_defaults(handler=cmd_sweep)

    plot = commands.add_parser("plot", help="plot delay and jitter from a packets.csv")
    plot.add_argument("packets_csv", type=Path)
    plot.add_argument("--out-dir", type=Path)
    plot.add_argument("--flow", help="plot a single flow")
    plot.set_defaults(handler=cmd_plot)
    return parser


def _out_dir(args) -> Path:
    return Path(args.out_dir) if args.out_dir is not None else Path(settings.OUTPUT_DIR)


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config = config.with_overrides(seed=args.seed)
    out_dir = _out_dir(args)

    try:
        result = Simulation(config, trace=args.trace).run()
    except SignalingError as exc:
        print(f"signaling failure: {exc}", file=sys.stderr)
        if exc.report is not None:
            print("\n".join(exc.report.summary_lines(settings.TIME_DECIMALS)), file=sys.stderr)
        raise

    report = result.report
    write_all = not (args.csv or args.summary)
    if args.csv or write_all:
        emit_packets_csv(result.records, out_dir / settings.PACKETS_CSV_NAME, decimals=settings.TIME_DECIMALS)
    if args.summary or write_all:
        emit_summary(report, out_dir / settings.SUMMARY_NAME, decimals=settings.TIME_DECIMALS)
    if args.trace:
        emit_trace(result.trace, out_dir / settings.TRACE_NAME)
    if args.plot:
        from lspsim.scenario.plots import plot_delay, plot_jitter

        frame = records_frame(result.records)
        plot_delay(frame, out_dir / settings.DELAY_PLOT_NAME)
        plot_jitter(frame, out_dir / settings.JITTER_PLOT_NAME)

    print("\n".join(report.summary_lines(settings.TIME_DECIMALS)))
    print(f"runtime={report.runtime:.3f}")
    return EXIT_OK


def cmd_check(args) -> int:
    config = load_scenario(args.scenario)
    print(
        f"ok: {config.nodes} nodes, {len(config.links)} links, {len(config.generators)} generators, "
        f"{len(config.lsps)} LSPs, {len(config.backups)} backups, {len(config.failures)} failures"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    from celery import group

    from lspsim.scenario.tasks import run_scenario_task

    # Fail fast on a bad scenario before any task is queued
    load_scenario(args.scenario)
    text = args.scenario.read_text(encoding="utf-8")
    seeds = list(args.seeds)

    if settings.CELERY_TASK_ALWAYS_EAGER:
        rows = [run_scenario_task.apply(args=(text, seed, args.end)).get() for seed in seeds]
    else:
        job = group(run_scenario_task.s(text, seed, args.end) for seed in seeds)
        rows = job.apply_async().get()

    frame = pd.DataFrame(rows).sort_values("seed")
    path = _out_dir(args) / settings.SWEEP_CSV_NAME
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=f"%.{settings.TIME_DECIMALS}f", lineterminator="\n")
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc

    logger.info("Sweep of %s seeds written to %s", len(seeds), path)
    print(frame.to_string(index=False))
    return EXIT_OK


def cmd_plot(args) -> int:
    from lspsim.scenario.plots import plot_delay, plot_jitter, read_packets_csv

    frame = read_packets_csv(args.packets_csv)
    out_dir = _out_dir(args)
    for path in (
        plot_delay(frame, out_dir / settings.DELAY_PLOT_NAME, flow_id=args.flow),
        plot_jitter(frame, out_dir / settings.JITTER_PLOT_NAME, flow_id=args.flow),
    ):
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except LspSimError as exc:
        code = exit_code_for(exc)
        if code is None:
            raise
        if not isinstance(exc, SignalingError):
            label = "invalid scenario" if isinstance(exc, ConfigError) else "error"
            print(f"{label}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
