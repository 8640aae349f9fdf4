"""Session lifecycle across all participants.

Timing rule: a session covers the half-open tick range [start, stop).
Start and stop requests take effect at the current tick if that tick has
not been processed yet, otherwise at the next one. Events of tick ``t``
and samples with instants inside tick ``t`` belong to the session iff
``start <= t < stop``.
"""

from __future__ import annotations

import logging
import random
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from voxlog import PLUGIN_VERSION
from voxlog.assembler.codec import merge_entries, serialize_session, session_filename
from voxlog.assembler.entries import SessionMetadata
from voxlog.assembler.store import write_session
from voxlog.assembler.timefmt import format_utc_ms
from voxlog.capture.pipeline import CaptureConfig, ParticipantPipeline, PipelineState
from voxlog.world.events import GameEvent
from voxlog.world.script import ScenarioScript
from voxlog.world.sim import World

log = logging.getLogger(__name__)


class SessionError(Exception):
    """Rejected session transition."""


@dataclass(frozen=True)
class SessionHandle:
    participant: str
    logfile_id: str


@dataclass
class FinishedSession:
    metadata: SessionMetadata
    data: bytes
    path: Path | None
    offered: int
    accepted: int
    dropped: int
    skipped_samples: int
    entries: int


class SessionManager:
    def __init__(
        self,
        world: World,
        config: CaptureConfig,
        *,
        output_dir: str | Path | None = None,
        plugin_version: str = PLUGIN_VERSION,
        logfile_seed: int | None = None,
    ):
        self.world = world
        self.config = config
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.plugin_version = plugin_version
        self._rng = random.Random(logfile_seed) if logfile_seed is not None else random.SystemRandom()
        self._issued_ids: set[str] = set()
        self._pipelines: dict[str, ParticipantPipeline] = {}
        self._handles: dict[str, SessionHandle] = {}
        self._lock = threading.RLock()
        self._processed_tick = -1
        self._pending_events: list[GameEvent] = []
        self._used_filenames: set[str] = set()
        self.finished: list[FinishedSession] = []
        self.on_finalized: list[Callable[[FinishedSession], None]] = []

    # -- clock ---------------------------------------------------------
    @property
    def effective_tick(self) -> int:
        """Tick at which a command issued now takes effect."""
        tick = self.world.tick
        return tick if self._processed_tick < tick else tick + 1

    def advance(self, script: ScenarioScript | None = None) -> list[GameEvent]:
        """Process the current tick if still pending, then advance the world one tick."""
        self.process()
        events = self.world.advance_tick(script)
        self._pending_events = events
        return events

    def process(self) -> None:
        """Feed the current tick's events and samples to every logging pipeline."""
        tick = self.world.tick
        if self._processed_tick >= tick:
            return
        snapshot = self.world.snapshot()
        events = self._pending_events
        with self._lock:
            active = [p for p in self._pipelines.values() if p.state is PipelineState.LOGGING]
        for pipeline in active:
            if events:
                pipeline.on_events(events)
            pipeline.on_snapshot(snapshot)
        self._pending_events = []
        self._processed_tick = tick

    # -- lifecycle -----------------------------------------------------
    def is_logging(self, participant: str) -> bool:
        with self._lock:
            p = self._pipelines.get(participant)
            return p is not None and p.state is not PipelineState.IDLE

    def logging_participants(self) -> list[str]:
        with self._lock:
            return sorted(n for n, p in self._pipelines.items() if p.state is PipelineState.LOGGING)

    def _new_logfile_id(self) -> str:
        while True:
            candidate = str(uuid.UUID(int=self._rng.getrandbits(128), version=4))
            if candidate not in self._issued_ids:
                self._issued_ids.add(candidate)
                return candidate

    def start_session(self, participant: str) -> SessionHandle:
        with self._lock:
            if participant not in self.world.avatars:
                raise SessionError(f"cannot start logging: participant {participant!r} is not in the world")
            current = self._pipelines.get(participant)
            if current is not None and current.state is not PipelineState.IDLE:
                raise SessionError(f"participant {participant!r} is already logging")
            clock = self.world.clock
            pipeline = ParticipantPipeline(participant, self.config, clock.epoch_ms, clock.tick_ms)
            pipeline.begin(self.effective_tick)
            handle = SessionHandle(participant, self._new_logfile_id())
            self._pipelines[participant] = pipeline
            self._handles[participant] = handle
            log.debug("started %s at tick %d", participant, pipeline.start_tick)
            return handle

    def stop_session(self, handle: SessionHandle | str) -> FinishedSession:
        participant = handle if isinstance(handle, str) else handle.participant
        with self._lock:
            pipeline = self._pipelines.get(participant)
            if pipeline is None or pipeline.state is not PipelineState.LOGGING:
                raise SessionError(f"participant {participant!r} is not logging")
            if not isinstance(handle, str) and self._handles[participant] != handle:
                raise SessionError(f"stale session handle for {participant!r}")
            pipeline.state = PipelineState.FINALIZING
            pipeline.stop_tick = self.effective_tick
            logfile_id = self._handles[participant].logfile_id
        try:
            finished = self._finalize(pipeline, logfile_id)
        finally:
            with self._lock:
                pipeline.state = PipelineState.IDLE
                del self._pipelines[participant]
                del self._handles[participant]
        self.finished.append(finished)
        for callback in self.on_finalized:
            callback(finished)
        return finished

    def handle_disconnect(self, participant: str) -> FinishedSession | None:
        """Participant left the world: finalize exactly as an explicit stop would."""
        result = self.stop_session(participant) if self.is_logging(participant) else None
        if participant in self.world.avatars:
            self.world.remove_avatar(participant)
        return result

    def finalize_all(self) -> list[FinishedSession]:
        return [self.stop_session(name) for name in self.logging_participants()]

    def drain_all(self) -> int:
        with self._lock:
            pipelines = list(self._pipelines.values())
        return sum(p.drain() for p in pipelines if p.state is PipelineState.LOGGING)

    def _unique_filename(self, base: str) -> str:
        name, n = base, 0
        while name in self._used_filenames:
            n += 1
            name = f"{base}-{n}"
        self._used_filenames.add(name)
        return name

    def _finalize(self, pipeline: ParticipantPipeline, logfile_id: str) -> FinishedSession:
        pipeline.drain()
        entries = merge_entries(pipeline.collected)
        clock = self.world.clock
        start_ms = clock.time_ms(pipeline.start_tick)
        assert pipeline.stop_tick is not None
        end_ms = clock.time_ms(pipeline.stop_tick)
        filename = self._unique_filename(session_filename(pipeline.participant, start_ms))
        metadata = SessionMetadata(
            logfile_id=logfile_id,
            filename=filename,
            username=pipeline.participant,
            game_start_time=format_utc_ms(start_ms),
            game_end_time=format_utc_ms(end_ms),
            plugin_version=self.plugin_version,
        )
        queue = pipeline.queue
        data = serialize_session(metadata, entries, queue.dropped_count)
        path = write_session(self.output_dir, filename, data) if self.output_dir is not None else None
        if queue.dropped_count:
            log.warning("%s: %d entries dropped on queue overflow", pipeline.participant, queue.dropped_count)
        return FinishedSession(
            metadata,
            data,
            path,
            queue.offered,
            queue.accepted,
            queue.dropped_count,
            pipeline.skipped_samples,
            len(entries),
        )


class DrainWorker(threading.Thread):
    """Background consumer moving queued entries out of every pipeline.

    The simulation thread calls :meth:`kick`; the worker drains whenever
    kicked and once more when stopped.
    """

    def __init__(self, manager: SessionManager):
        super().__init__(name="capture-drain", daemon=True)
        self.manager = manager
        self._wake = threading.Event()
        self._halt = threading.Event()
        self.drained = 0

    def kick(self) -> None:
        self._wake.set()

    def run(self) -> None:
        while not self._halt.is_set():
            self._wake.wait()
            self._wake.clear()
            self.drained += self.manager.drain_all()

    def stop(self) -> None:
        self._halt.set()
        self._wake.set()
        self.join()
