"""``voxlog`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from voxlog import PLUGIN_VERSION
from voxlog.assembler.codec import SessionParseError
from voxlog.assembler.schema import SchemaError
from voxlog.capture.cadence import ConfigError
from voxlog.capture.pipeline import CaptureConfig
from voxlog.capture.poller import FieldSelector, PollerSpec
from voxlog.control.config import RunConfig, load_config
from voxlog.control.inspect import summarize_log, validate_log
from voxlog.control.runner import EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, EXIT_USAGE, run_scenario
from voxlog.transport.client import Endpoint
from voxlog.world.sim import TICK_RATE

log = logging.getLogger("voxlog")


def _poller(text: str) -> PollerSpec:
    # LABEL:HZ:field,field
    try:
        label, hz, fields = text.split(":", 2)
        return PollerSpec(label, int(hz), tuple(FieldSelector.parse(f) for f in fields.split(",") if f))
    except (ValueError, ConfigError) as exc:
        raise argparse.ArgumentTypeError(f"bad poller {text!r}: {exc}") from None


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "output_dir": args.output_dir,
        "plugin_version": args.plugin_version,
        "logfile_seed": args.seed,
        "endpoint": Endpoint.parse(args.endpoint) if args.endpoint else None,
        "ticks": args.ticks if args.ticks is not None else (round(args.duration * TICK_RATE) if args.duration else None),
    }
    if args.config:
        config = load_config(args.config)
        if args.scenario:
            overrides["scenario"] = args.scenario
        return config.with_overrides(**overrides)
    if not args.scenario:
        raise ConfigError("give --config or --scenario")
    pollers = tuple(args.poller or [PollerSpec("HIGH_FREQUENCY_LOG_20Hz", 20, (FieldSelector.LOCATION, FieldSelector.VIEW))])
    capture = CaptureConfig(pollers=pollers, capture_events=not args.no_events)
    if args.queue_capacity:
        capture = replace(capture, queue_capacity=args.queue_capacity)
    return RunConfig(
        scenario=args.scenario,
        output_dir=args.output_dir or Path("."),
        ticks=overrides["ticks"] or 60 * TICK_RATE,
        capture=capture,
        plugin_version=args.plugin_version or PLUGIN_VERSION,
        logfile_seed=args.seed,
        endpoint=overrides["endpoint"],
    )


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = run_scenario(config)
    for outcome in result.commands:
        mark = "ok" if outcome.ok else "rejected"
        print(f"[tick {outcome.tick}] {outcome.issuer} {outcome.command}: {mark}: {outcome.message}")
    for line in result.diagnostics:
        print(f"warning: {line}" if result.exit_status == EXIT_OK else f"error: {line}", file=sys.stderr)
    for done in result.finished:
        print(f"{done.metadata.username}: {done.entries} entries, {done.dropped} dropped -> {done.path}")
    return result.exit_status


def cmd_validate(args: argparse.Namespace) -> int:
    status = EXIT_OK
    for path in args.paths:
        try:
            report = validate_log(path)
        except OSError as exc:
            print(f"{path}: cannot read: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
        if report.ok:
            print(f"{path}: ok")
        else:
            status = EXIT_INVALID
            for violation in report.violations:
                print(f"{path}: {violation}")
    return status


def cmd_summarize(args: argparse.Namespace) -> int:
    try:
        summary = summarize_log(args.path)
    except OSError as exc:
        print(f"{args.path}: cannot read: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, SessionParseError) as exc:
        print(f"{args.path}: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(summary.as_dict(), indent=2) if args.json else summary.render())
    return EXIT_OK


def cmd_sink(args: argparse.Namespace) -> int:
    from voxlog.transport.sink import SinkConfig, sink_serve

    try:
        config = SinkConfig.from_env(host=args.host, port=args.port, storage=args.storage, max_frame=args.max_frame)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        print(f"sink listening on {config.host}:{config.port}, storing under {config.storage}", flush=True)
        sink_serve(config)
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"error: cannot listen on {config.host}:{config.port}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_version(args: argparse.Namespace) -> int:
    print(PLUGIN_VERSION)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    from voxlog.bench.load import compare_architectures, run_load
    from voxlog.bench.report import emit_report, load_profile, write_reports

    try:
        profile = load_profile(args.profile)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.bench_command == "run":
        if args.architecture:
            profile = replace(profile, architecture=args.architecture)
        report = run_load(profile)
        tag = profile.architecture.value
    else:
        report = compare_architectures(profile)
        tag = "compare"
    sys.stdout.write(emit_report(report, args.format).decode("utf-8"))
    for path in write_reports(report, args.profile, tag):
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voxlog", description="Headless voxel-world session logger.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write session logs")
    run.add_argument("--config", type=Path, help="TOML run configuration")
    run.add_argument("--scenario", type=Path)
    run.add_argument("--output-dir", type=Path)
    group = run.add_mutually_exclusive_group()
    group.add_argument("--ticks", type=int)
    group.add_argument("--duration", type=float, help="simulated seconds")
    run.add_argument("--seed", type=int, help="seed for reproducible logfile ids")
    run.add_argument("--plugin-version")
    run.add_argument("--endpoint", help="HOST:PORT of a sink to transmit to")
    run.add_argument("--poller", type=_poller, action="append", help="LABEL:HZ:field,field (without --config)")
    run.add_argument("--queue-capacity", type=int)
    run.add_argument("--no-events", action="store_true")
    run.set_defaults(func=cmd_run)

    validate = sub.add_parser("validate", help="check session log files")
    validate.add_argument("paths", nargs="+", type=Path)
    validate.set_defaults(func=cmd_validate)

    summarize = sub.add_parser("summarize", help="counts, rates and event histogram of a log")
    summarize.add_argument("path", type=Path)
    summarize.add_argument("--json", action="store_true")
    summarize.set_defaults(func=cmd_summarize)

    sink = sub.add_parser("sink", help="run the archival sink (VOXLOG_SINK_* env vars also apply)")
    sink.add_argument("--host")
    sink.add_argument("--port", type=int)
    sink.add_argument("--storage", type=Path)
    sink.add_argument("--max-frame", type=int)
    sink.set_defaults(func=cmd_sink)

    version = sub.add_parser("version", help="print the plugin version")
    version.set_defaults(func=cmd_version)

    bench = sub.add_parser("bench", help="queue architecture load tests")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    for name in ("run", "compare"):
        p = bench_sub.add_parser(name)
        p.add_argument("--profile", type=Path, required=True)
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        if name == "run":
            p.add_argument("--architecture", choices=("centralized", "distributed"))
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
