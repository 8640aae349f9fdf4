"""Log entries and session documents.

Both entry kinds carry an ordering key that is never serialized:
``instant_ms`` (absolute UTC milliseconds of the sample or event),
``seq`` (queue sequence number) and ``actor`` (the participant the entry
was captured for). Equality ignores them, so a parsed document compares
equal to the one that was serialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar, Union

EVENT_LOG = "EVENT_LOG"
METADATA_KEYS = ("logfile_id", "filename", "username", "game_start_time", "game_end_time", "plugin_version")
DOCUMENT_KEYS = (*METADATA_KEYS, "dropped_entries", "logs")


@dataclass(slots=True)
class StateSample:
    type: str
    time: str
    game_tick: int
    payload: dict[str, Any]
    instant_ms: int = field(default=0, compare=False, repr=False)
    seq: int = field(default=-1, compare=False, repr=False)
    actor: str | None = field(default=None, compare=False, repr=False)

    RANK: ClassVar[int] = 1

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.game_tick, self.instant_ms, 1, self.seq)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"type": self.type, "time": self.time, "game_tick": self.game_tick}
        out.update(self.payload)
        return out


@dataclass(slots=True)
class EventRecord:
    time: str
    game_tick: int
    event: str
    event_info: dict[str, Any]
    instant_ms: int = field(default=0, compare=False, repr=False)
    seq: int = field(default=-1, compare=False, repr=False)
    actor: str | None = field(default=None, compare=False, repr=False)

    RANK: ClassVar[int] = 0
    type: ClassVar[str] = EVENT_LOG

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.game_tick, self.instant_ms, 0, self.seq)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": EVENT_LOG,
            "time": self.time,
            "game_tick": self.game_tick,
            "event": self.event,
            "event_info": self.event_info,
        }


LogEntry = Union[StateSample, EventRecord]


@dataclass
class SessionMetadata:
    logfile_id: str
    filename: str
    username: str
    game_start_time: str
    game_end_time: str
    plugin_version: str

    def to_json(self) -> dict[str, str]:
        return {key: getattr(self, key) for key in METADATA_KEYS}


@dataclass
class SessionDocument:
    metadata: SessionMetadata
    logs: list[LogEntry] = field(default_factory=list)
    dropped_entries: int = 0

    @property
    def username(self) -> str:
        return self.metadata.username

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = self.metadata.to_json()
        out["dropped_entries"] = self.dropped_entries
        out["logs"] = [entry.to_json() for entry in self.logs]
        return out
