"""Load generator comparing a centralized queue against per-participant queues.

Simulated time is cut into windows. In each window every producer thread
offers the entries whose simulated instants fall inside it, concurrently
with the other producers; then the consumer thread drains its budget for
the window. Barriers separate the two phases, so queue occupancy and
therefore every accounting figure depends only on the profile, while
enqueue latency is measured in wall time around each ``offer`` call.
"""

from __future__ import annotations

import math
import statistics
import threading
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Sequence

from voxlog.assembler.entries import StateSample
from voxlog.capture.queue import DEFAULT_CAPACITY, CaptureQueue, SharedQueue


class Architecture(str, Enum):
    CENTRALIZED = "centralized"
    DISTRIBUTED = "distributed"


@dataclass(frozen=True)
class LoadProfile:
    """One load point.

    ``queue_capacity`` is the total across participants (the distributed
    arm splits it evenly); None means 65,536 per participant. The consumer
    drains ``service_rate_per_ms`` entries per simulated ms, or
    ``service_fraction`` of the aggregate offer rate; with neither set it
    drains everything each window.
    """

    participants: int
    architecture: Architecture
    frequencies_hz: tuple[int, ...] = (20,)
    event_rate_hz: float = 0.0
    duration_s: float = 60.0
    queue_capacity: int | None = None
    service_rate_per_ms: float | None = None
    service_fraction: float | None = None
    window_ms: int = 50

    def __post_init__(self) -> None:
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        object.__setattr__(self, "frequencies_hz", tuple(self.frequencies_hz))
        if self.participants <= 0 or self.duration_s <= 0 or self.window_ms <= 0:
            raise ValueError("participants, duration_s and window_ms must be positive")
        if any(f <= 0 for f in self.frequencies_hz) or self.event_rate_hz < 0:
            raise ValueError("rates must be positive")
        if not self.frequencies_hz and not self.event_rate_hz:
            raise ValueError("profile offers no load")
        if self.queue_capacity is not None and self.queue_capacity < self.participants:
            raise ValueError("queue_capacity must give every participant at least one slot")
        if self.service_rate_per_ms is not None and self.service_fraction is not None:
            raise ValueError("set service_rate_per_ms or service_fraction, not both")
        for name in ("service_rate_per_ms", "service_fraction"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def total_capacity(self) -> int:
        return self.queue_capacity if self.queue_capacity is not None else DEFAULT_CAPACITY * self.participants

    @property
    def offer_rate_per_ms(self) -> float:
        """Aggregate offered entries per simulated ms."""
        return self.participants * (sum(self.frequencies_hz) + self.event_rate_hz) / 1000.0

    @property
    def service_per_ms(self) -> float | None:
        if self.service_rate_per_ms is not None:
            return self.service_rate_per_ms
        if self.service_fraction is not None:
            return self.service_fraction * self.offer_rate_per_ms
        return None


def _instants(period_ms: float, duration_ms: int) -> list[int]:
    count = math.ceil(duration_ms / period_ms - 1e-9)
    return [int(round(k * period_ms)) for k in range(count)]


def offer_schedule(profile: LoadProfile) -> list[int]:
    """Entries each participant offers per window (identical for every participant)."""
    duration_ms = int(round(profile.duration_s * 1000))
    windows = math.ceil(duration_ms / profile.window_ms)
    counts = [0] * windows
    periods = [1000.0 / f for f in profile.frequencies_hz]
    if profile.event_rate_hz:
        periods.append(1000.0 / profile.event_rate_hz)
    for period in periods:
        for t in _instants(period, duration_ms):
            counts[t // profile.window_ms] += 1
    return counts


@dataclass
class ParticipantStats:
    participant: int
    offered: int = 0
    accepted: int = 0
    dropped: int = 0


@dataclass
class BenchReport:
    architecture: str
    participants: int
    offered: int
    accepted: int
    dropped: int
    drop_rate: float
    latency_p50_ns: float
    latency_p99_ns: float
    latency_samples: int
    throughput_eps: float
    wall_s: float
    per_participant: list[ParticipantStats] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _percentiles(samples: list[int]) -> tuple[float, float]:
    if len(samples) < 2:
        value = float(samples[0]) if samples else 0.0
        return value, value
    cuts = statistics.quantiles(samples, n=100, method="inclusive")
    return cuts[49], cuts[98]


def _drain_round_robin(queues: Sequence[CaptureQueue], budget: int, start: int) -> int:
    """Work-conserving round-robin: equal shares of ``budget`` to non-empty queues."""
    drained = 0
    n = len(queues)
    while budget > 0:
        live = [queues[(start + i) % n] for i in range(n) if len(queues[(start + i) % n])]
        if not live:
            break
        share = max(1, budget // len(live))
        for q in live:
            took = len(q.drain(min(share, budget)))
            budget -= took
            drained += took
            if budget == 0:
                break
    return drained


def run_load(profile: LoadProfile) -> BenchReport:
    n = profile.participants
    schedule = offer_schedule(profile)
    capacity = profile.total_capacity
    if profile.architecture is Architecture.CENTRALIZED:
        shared: SharedQueue = SharedQueue(capacity)
        producer_queues: list[CaptureQueue] = [shared] * n
        consumer_queues: list[CaptureQueue] = [shared]
    else:
        base, extra = divmod(capacity, n)
        producer_queues = [CaptureQueue(base + (1 if i < extra else 0)) for i in range(n)]
        consumer_queues = producer_queues

    service = profile.service_per_ms
    stats = [ParticipantStats(i) for i in range(n)]
    latencies: list[list[int]] = [[] for _ in range(n)]
    start_gate = threading.Barrier(n + 1)
    end_gate = threading.Barrier(n + 1)
    errors: list[BaseException] = []
    window_ms = profile.window_ms
    label = "BENCH_LOG"

    def producer(i: int) -> None:
        queue = producer_queues[i]
        mine = stats[i]
        lat = latencies[i]
        clock = time.perf_counter_ns
        seq = 0
        try:
            for w, count in enumerate(schedule):
                # entries are built before the gate so only offer() is timed
                batch = [StateSample(label, "", w, {"p": i, "n": seq + k}) for k in range(count)]
                seq += count
                start_gate.wait()
                for entry in batch:
                    t0 = clock()
                    ok = queue.offer(entry)
                    lat.append(clock() - t0)
                    if ok:
                        mine.accepted += 1
                    else:
                        mine.dropped += 1
                mine.offered += count
                end_gate.wait()
        except BaseException as exc:  # surfaced after join
            errors.append(exc)
            start_gate.abort()
            end_gate.abort()

    threads = [threading.Thread(target=producer, args=(i,), name=f"bench-producer-{i}") for i in range(n)]
    t_start = time.perf_counter()
    for t in threads:
        t.start()
    credit = 0.0
    rr = 0
    drained = 0
    try:
        for _ in schedule:
            start_gate.wait()
            end_gate.wait()
            if service is None:
                drained += sum(len(q.drain()) for q in consumer_queues)
                continue
            credit += service * window_ms
            budget = int(credit + 1e-9)
            credit -= budget  # unused budget does not carry over
            if len(consumer_queues) == 1:
                drained += len(consumer_queues[0].drain(budget))
            else:
                drained += _drain_round_robin(consumer_queues, budget, rr)
                rr = (rr + 1) % n
    except threading.BrokenBarrierError:
        pass
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    for q in consumer_queues:
        drained += len(q.drain())
    wall = time.perf_counter() - t_start

    offered = sum(s.offered for s in stats)
    accepted = sum(s.accepted for s in stats)
    dropped = sum(s.dropped for s in stats)
    assert offered == accepted + dropped == sum(q.offered for q in consumer_queues)
    assert drained == accepted
    flat = [x for lat in latencies for x in lat]
    p50, p99 = _percentiles(flat)
    return BenchReport(
        architecture=profile.architecture.value,
        participants=n,
        offered=offered,
        accepted=accepted,
        dropped=dropped,
        drop_rate=dropped / offered if offered else 0.0,
        latency_p50_ns=p50,
        latency_p99_ns=p99,
        latency_samples=len(flat),
        throughput_eps=accepted / wall if wall > 0 else 0.0,
        wall_s=wall,
        per_participant=stats,
    )


@dataclass
class Comparison:
    centralized: BenchReport
    distributed: BenchReport

    @property
    def drop_rate_delta(self) -> float:
        """Distributed minus centralized; <= 0 favours the distributed arm."""
        return self.distributed.drop_rate - self.centralized.drop_rate

    @property
    def p99_delta_ns(self) -> float:
        return self.distributed.latency_p99_ns - self.centralized.latency_p99_ns

    @property
    def distributed_drops_le(self) -> bool:
        return self.distributed.drop_rate <= self.centralized.drop_rate

    @property
    def distributed_p99_le(self) -> bool:
        return self.distributed.latency_p99_ns <= self.centralized.latency_p99_ns

    def as_dict(self) -> dict[str, Any]:
        return {
            "centralized": self.centralized.as_dict(),
            "distributed": self.distributed.as_dict(),
            "drop_rate_delta": self.drop_rate_delta,
            "p99_delta_ns": self.p99_delta_ns,
            "distributed_drops_le": self.distributed_drops_le,
            "distributed_p99_le": self.distributed_p99_le,
        }


def compare_architectures(first: LoadProfile, second: LoadProfile | None = None) -> Comparison:
    """Run both arms. With one profile, the other arm is the same profile with the architecture swapped."""
    if second is None:
        other = Architecture.DISTRIBUTED if first.architecture is Architecture.CENTRALIZED else Architecture.CENTRALIZED
        second = replace(first, architecture=other)
    if replace(first, architecture=second.architecture) != second or first.architecture is second.architecture:
        raise ValueError("profiles must be identical except for the architecture")
    by_arch = {p.architecture: p for p in (first, second)}
    return Comparison(
        centralized=run_load(by_arch[Architecture.CENTRALIZED]),
        distributed=run_load(by_arch[Architecture.DISTRIBUTED]),
    )
