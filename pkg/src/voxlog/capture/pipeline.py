"""Per-participant capture: pollers, event filter and an owned queue."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

from voxlog.assembler.entries import EventRecord, LogEntry, StateSample
from voxlog.assembler.timefmt import format_utc_ms
from voxlog.capture.poller import ParticipantAbsent, PayloadCache, PollerSpec, SelectorSettings
from voxlog.capture.queue import DEFAULT_CAPACITY, CaptureQueue
from voxlog.world.events import EventKind, GameEvent
from voxlog.world.sim import WorldSnapshot


class PipelineState(enum.Enum):
    IDLE = "idle"
    LOGGING = "logging"
    FINALIZING = "finalizing"


@dataclass(frozen=True)
class CaptureConfig:
    pollers: tuple[PollerSpec, ...] = ()
    settings: SelectorSettings = field(default_factory=SelectorSettings)
    queue_capacity: int = DEFAULT_CAPACITY
    capture_events: bool = True
    event_kinds: frozenset[EventKind] | None = None

    def __post_init__(self) -> None:
        labels = [p.label for p in self.pollers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"poller labels must be unique, got {labels}")
        if self.queue_capacity <= 0:
            raise ValueError("queue capacity must be positive")


def filter_event(event: GameEvent, pipeline: ParticipantPipeline) -> EventRecord | None:
    """EventRecord for ``event`` if it belongs to the pipeline's participant.

    Other participants' events are not this pipeline's business; they are
    neither recorded nor counted as losses.
    """
    if event.actor != pipeline.participant:
        return None
    kinds = pipeline.config.event_kinds
    if kinds is not None and event.kind not in kinds:
        return None
    instant = pipeline.epoch_ms + event.game_tick * pipeline.tick_ms
    return EventRecord(
        format_utc_ms(instant),
        event.game_tick,
        event.name,
        dict(event.payload),
        instant_ms=instant,
        actor=event.actor,
    )


class ParticipantPipeline:
    """Everything captured for one participant during one session.

    The simulation thread is the only producer into ``queue``; ``drain`` is
    the only consumer and may run on another thread.
    """

    def __init__(self, participant: str, config: CaptureConfig, epoch_ms: int, tick_ms: int):
        self.participant = participant
        self.config = config
        self.epoch_ms = epoch_ms
        self.tick_ms = tick_ms
        self.queue: CaptureQueue[LogEntry] = CaptureQueue(config.queue_capacity)
        self.state = PipelineState.IDLE
        self.start_tick = 0
        self.stop_tick: int | None = None
        self.collected: list[LogEntry] = []
        self.skipped_samples = 0
        self._next_sample: dict[str, int] = {}
        self._cache = PayloadCache()
        self._drain_lock = threading.Lock()

    def begin(self, start_tick: int) -> None:
        self.start_tick = start_tick
        start_ms = start_tick * self.tick_ms
        self._next_sample = {p.label: p.cadence.first_at_or_after(start_ms) for p in self.config.pollers}
        self.state = PipelineState.LOGGING

    def on_events(self, events: list[GameEvent]) -> None:
        if not self.config.capture_events:
            return
        offer = self.queue.offer
        for event in events:
            record = filter_event(event, self)
            if record is not None:
                offer(record)

    def on_snapshot(self, snapshot: WorldSnapshot) -> None:
        """Fire every poller instant inside the snapshot's tick."""
        tick_end = (snapshot.clock.tick + 1) * self.tick_ms
        avatar = snapshot.avatars.get(self.participant)
        offer = self.queue.offer
        for spec in self.config.pollers:
            label = spec.label
            t = self._next_sample[label]
            if t >= tick_end:
                continue
            period = spec.cadence.period_ms
            if avatar is None:
                # participant left between scheduling and firing
                while t < tick_end:
                    self.skipped_samples += 1
                    t += period
                self._next_sample[label] = t
                continue
            payload = self._cache.get(snapshot, avatar, spec, self.config.settings)
            tick = snapshot.clock.tick
            while t < tick_end:
                absolute = self.epoch_ms + t
                offer(StateSample(label, format_utc_ms(absolute), tick, payload, instant_ms=absolute, actor=self.participant))
                t += period
            self._next_sample[label] = t

    def drain(self) -> int:
        with self._drain_lock:
            items = self.queue.drain()
            self.collected.extend(items)
            return len(items)


__all__ = [
    "CaptureConfig",
    "ParticipantAbsent",
    "ParticipantPipeline",
    "PipelineState",
    "filter_event",
]
