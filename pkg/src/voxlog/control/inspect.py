"""Consumer-side checks and summaries for session log files."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from voxlog.assembler.codec import SessionParseError, load_json
from voxlog.assembler.entries import EVENT_LOG
from voxlog.assembler.schema import SchemaError, Violation, check_document
from voxlog.assembler.timefmt import parse_utc_ms
from voxlog.capture.poller import LABEL_HZ
from voxlog.world.sim import TICK_MS


@dataclass
class ValidationReport:
    path: Path
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_ordering(logs: list[dict[str, Any]], out: list[Violation]) -> None:
    prev = None
    for i, entry in enumerate(logs):
        key = (entry["game_tick"], parse_utc_ms(entry["time"]), 0 if entry["type"] == EVENT_LOG else 1)
        if prev is not None and key < prev:
            if key[0] < prev[0]:
                what = f"game_tick {key[0]} follows {prev[0]} at entry {i - 1}"
            elif key[1] < prev[1]:
                what = f"time goes backwards relative to entry {i - 1}"
            else:
                what = f"event follows a state sample of the same instant at entry {i - 1}"
            out.append(Violation(f"$.logs[{i}]", f"out of order: {what}"))
        prev = key


def _check_cadence(doc: dict[str, Any], out: list[Violation]) -> None:
    start = parse_utc_ms(doc["game_start_time"])
    end = parse_utc_ms(doc["game_end_time"])
    per_label: dict[str, list[tuple[int, int]]] = defaultdict(list)
    offsets = []
    for i, entry in enumerate(doc["logs"]):
        t = parse_utc_ms(entry["time"])
        if not start <= t <= end:
            out.append(Violation(f"$.logs[{i}].time", "outside the session window"))
        offsets.append((t - entry["game_tick"] * TICK_MS, i))
        if entry["type"] != EVENT_LOG:
            per_label[entry["type"]].append((t, i))
    # every entry's time must sit inside its own tick: time - tick*50 spans less than one tick
    if offsets:
        lo, hi = min(offsets), max(offsets)
        if hi[0] - lo[0] >= TICK_MS:
            out.append(Violation(f"$.logs[{hi[1]}].time", f"inconsistent with game_tick (entry {lo[1]} disagrees)"))
    for label, samples in per_label.items():
        match = LABEL_HZ.search(label)
        hz = int(match.group(1)) if match else 0
        period = 1000 // hz if hz and 1000 % hz == 0 else None
        if period is None and len(samples) > 1:
            period = samples[1][0] - samples[0][0]
        for (t0, _), (t1, i1) in zip(samples, samples[1:]):
            if t1 - t0 != period:
                out.append(Violation(f"$.logs[{i1}].time", f"{label} interval {t1 - t0} ms, expected {period} ms"))
                break


def _check_actor(doc: dict[str, Any], out: list[Violation]) -> None:
    username = doc["username"]
    for i, entry in enumerate(doc["logs"]):
        if entry["type"] == EVENT_LOG and entry["event_info"].get("player") != username:
            out.append(Violation(f"$.logs[{i}].event_info.player", f"belongs to another participant, not {username!r}"))


def validate_document(obj: Any) -> list[Violation]:
    violations = check_document(obj)
    if violations:
        return violations
    _check_ordering(obj["logs"], violations)
    _check_cadence(obj, violations)
    _check_actor(obj, violations)
    return violations


def validate_log(path: str | Path) -> ValidationReport:
    """Schema, ordering, cadence and actor checks; an unreadable file raises OSError."""
    path = Path(path)
    data = path.read_bytes()
    try:
        obj = load_json(data)
    except SessionParseError as exc:
        return ValidationReport(path, [Violation("$", str(exc))])
    return ValidationReport(path, validate_document(obj))


@dataclass
class LogSummary:
    username: str
    duration_s: float
    counts: dict[str, int]
    rates_hz: dict[str, float]
    events: dict[str, int]
    dropped_entries: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "username": self.username,
            "duration_s": self.duration_s,
            "counts": self.counts,
            "rates_hz": self.rates_hz,
            "events": self.events,
            "dropped_entries": self.dropped_entries,
        }

    def render(self) -> str:
        lines = [f"participant  {self.username}", f"duration     {self.duration_s:.3f} s"]
        for label, count in self.counts.items():
            rate = self.rates_hz.get(label)
            suffix = f"  ({rate:.3f} Hz)" if rate is not None else ""
            lines.append(f"  {label:<32} {count:>8}{suffix}")
        if self.events:
            lines.append("events")
            lines.extend(f"  {name:<32} {n:>8}" for name, n in self.events.items())
        if self.dropped_entries:
            lines.append(f"dropped      {self.dropped_entries}")
        return "\n".join(lines)


def summarize_log(path: str | Path) -> LogSummary:
    """Per-type counts, duration and effective rates; invalid files raise SchemaError."""
    obj = load_json(Path(path).read_bytes())
    violations = validate_document(obj)
    if violations:
        raise SchemaError(violations)
    duration_s = (parse_utc_ms(obj["game_end_time"]) - parse_utc_ms(obj["game_start_time"])) / 1000.0
    counts = Counter(entry["type"] for entry in obj["logs"])
    events = Counter(entry["event"] for entry in obj["logs"] if entry["type"] == EVENT_LOG)
    rates = {label: n / duration_s for label, n in counts.items() if label != EVENT_LOG and duration_s > 0}
    return LogSummary(
        obj["username"],
        duration_s,
        dict(sorted(counts.items())),
        dict(sorted(rates.items())),
        dict(sorted(events.items())),
        obj.get("dropped_entries", 0),
    )
