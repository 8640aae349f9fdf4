"""Headless driver: build the world, run scripted agents and commands, write logs."""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from voxlog.capture.cadence import ConfigError
from voxlog.capture.session import DrainWorker, FinishedSession, SessionManager
from voxlog.control.commands import CommandResult, CommandSurface
from voxlog.control.config import RunConfig, load_config
from voxlog.transport.client import TransmitResult, transmit_session
from voxlog.world.scenario import Directive, Scenario, load_scenario
from voxlog.world.script import ScenarioError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


@dataclass
class RunResult:
    exit_status: int
    documents: dict[str, list[Path]] = field(default_factory=dict)
    finished: list[FinishedSession] = field(default_factory=list)
    commands: list[CommandResult] = field(default_factory=list)
    transmissions: dict[str, TransmitResult] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def dropped(self) -> int:
        return sum(f.dropped for f in self.finished)


def _simulate(config: RunConfig, scenario: Scenario, result: RunResult) -> None:
    world = scenario.build_world(config.epoch)
    manager = SessionManager(
        world,
        config.capture,
        output_dir=config.output_dir,
        plugin_version=config.plugin_version,
        logfile_seed=config.logfile_seed,
    )
    surface = CommandSurface(manager)

    pending: list[tuple[str, Future[TransmitResult]]] = []
    executor = ThreadPoolExecutor(max_workers=2, thread_name_prefix="transmit") if config.endpoint else None

    def finalized(done: FinishedSession) -> None:
        result.finished.append(done)
        if done.path is not None:
            result.documents.setdefault(done.metadata.username, []).append(done.path)
        if executor is not None:
            pending.append(
                (done.metadata.filename, executor.submit(transmit_session, done.data, config.endpoint, config.retry))
            )

    manager.on_finalized.append(finalized)

    by_tick: dict[int, list[Directive]] = defaultdict(list)
    for directive in scenario.directives:
        if directive.tick <= config.ticks:
            by_tick[directive.tick].append(directive)

    def run_directives(tick: int) -> None:
        for directive in by_tick.get(tick, ()):
            outcome = surface.execute(directive)
            result.commands.append(outcome)
            if not outcome.ok:
                result.diagnostics.append(f"line {directive.line}: tick {tick}: {outcome.message}")

    worker = DrainWorker(manager) if config.drain_every_ticks else None
    if worker is not None:
        worker.start()
    try:
        run_directives(0)
        manager.process()
        for tick in range(1, config.ticks + 1):
            manager.advance(scenario.script)
            run_directives(tick)
            if tick < config.ticks:
                manager.process()
            if worker is not None and tick % config.drain_every_ticks == 0:
                worker.kick()
        if worker is not None:
            worker.stop()
            worker = None
        manager.finalize_all()
    finally:
        if worker is not None:
            worker.stop()
        if executor is not None:
            executor.shutdown(wait=True)
    for filename, future in pending:
        outcome = future.result()
        result.transmissions[filename] = outcome
        if not outcome.delivered:
            result.diagnostics.append(f"{filename}: transmission failed ({outcome.error}); kept on disk")


def run_scenario(config: RunConfig | str | Path) -> RunResult:
    """Run one simulation; the exit status follows the CLI convention.

    Dropped entries are reported in the result, never treated as failure.
    """
    try:
        if not isinstance(config, RunConfig):
            config = load_config(config)
    except ConfigError as exc:
        return RunResult(EXIT_USAGE, diagnostics=[str(exc)])
    try:
        scenario = load_scenario(config.scenario)
    except ScenarioError as exc:
        return RunResult(EXIT_USAGE, diagnostics=[f"{config.scenario}: {exc}"])
    except OSError as exc:
        return RunResult(EXIT_USAGE, diagnostics=[f"cannot read scenario {config.scenario}: {exc.strerror}"])

    result = RunResult(EXIT_OK)
    try:
        _simulate(config, scenario, result)
    except ScenarioError as exc:
        result.exit_status = EXIT_USAGE
        result.diagnostics.append(f"{config.scenario}: {exc}")
    except Exception as exc:  # noqa: BLE001 -- reported as an internal error exit
        log.exception("internal error during run")
        result.exit_status = EXIT_INTERNAL
        result.diagnostics.append(f"internal error: {type(exc).__name__}: {exc}")
    return result
