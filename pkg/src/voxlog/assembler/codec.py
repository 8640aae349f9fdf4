"""Canonical JSON encoding of session documents, and the inverse parser."""

from __future__ import annotations

import json
from typing import Any, Iterable, Sequence

from voxlog.assembler.entries import (
    EVENT_LOG,
    METADATA_KEYS,
    EventRecord,
    LogEntry,
    SessionDocument,
    SessionMetadata,
    StateSample,
)
from voxlog.assembler.schema import SchemaError, check_document
from voxlog.assembler.timefmt import format_utc_ms, parse_utc_ms

_ENCODER = json.JSONEncoder(ensure_ascii=False, separators=(",", ":"), allow_nan=False)
_UNSAFE_FILENAME_CHARS = set('/\\<>:"|?*')


class AssemblyError(RuntimeError):
    """Internal contract violation while assembling a document."""


class SessionParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


def merge_entries(entries: Iterable[LogEntry]) -> list[LogEntry]:
    """Chronological total order: tick, sample instant, events first, then sequence."""
    return sorted(entries, key=lambda e: e.sort_key())


def _check_ordered(entries: Sequence[LogEntry]) -> None:
    prev = None
    for i, entry in enumerate(entries):
        key = entry.sort_key()
        if prev is not None and key < prev:
            raise AssemblyError(f"entries not in merge order at index {i}: {key} after {prev}")
        prev = key


def serialize_session(metadata: SessionMetadata, entries: Sequence[LogEntry], dropped_entries: int = 0) -> bytes:
    """Compact canonical UTF-8 JSON; identical input yields identical bytes."""
    _check_ordered(entries)
    return encode_document(SessionDocument(metadata, list(entries), dropped_entries))


def encode_document(document: SessionDocument) -> bytes:
    return _ENCODER.encode(document.to_json()).encode("utf-8")


def _entry_from_json(raw: dict[str, Any]) -> LogEntry:
    instant = parse_utc_ms(raw["time"])
    if raw["type"] == EVENT_LOG:
        return EventRecord(raw["time"], raw["game_tick"], raw["event"], raw["event_info"], instant_ms=instant, seq=-1)
    payload = {k: v for k, v in raw.items() if k not in ("type", "time", "game_tick")}
    return StateSample(raw["type"], raw["time"], raw["game_tick"], payload, instant_ms=instant)


def load_json(data: bytes) -> Any:
    """Decode bytes to JSON, reporting failures with a byte offset."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SessionParseError(f"invalid UTF-8 ({exc.reason})", exc.start) from None
    if text.startswith("\ufeff"):
        raise SessionParseError("byte order mark is not allowed", 0)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise SessionParseError(f"malformed JSON: {exc.msg}", offset) from None


def document_from_json(obj: Any) -> SessionDocument:
    violations = check_document(obj)
    if violations:
        raise SchemaError(violations)
    metadata = SessionMetadata(**{key: obj[key] for key in METADATA_KEYS})
    logs = [_entry_from_json(raw) for raw in obj["logs"]]
    for seq, entry in enumerate(logs):
        entry.seq = seq
        entry.actor = metadata.username
    return SessionDocument(metadata, logs, obj.get("dropped_entries", 0))


def parse_session(data: bytes) -> SessionDocument:
    """Parse and schema-check one session document.

    Raises SessionParseError (with byte offset) for undecodable input and
    SchemaError (with JSON paths) for structural violations. Unknown poller
    labels are accepted; unknown state field names are not.
    """
    return document_from_json(load_json(data))


def session_filename(username: str, start_time: str | int) -> str:
    """``<username>_<timestamp>`` with ``:`` and ``.`` in the timestamp turned into ``-``.

    ``start_time`` may be an absolute millisecond count or a formatted stamp.
    The on-disk file adds ``.json``.
    """
    if not isinstance(username, str) or not username:
        raise ValueError("username must be non-empty")
    if any(c in _UNSAFE_FILENAME_CHARS for c in username) or not username.isprintable() or username in (".", ".."):
        raise ValueError(f"username {username!r} is not safe in a filename")
    stamp = format_utc_ms(start_time) if isinstance(start_time, int) else start_time
    parse_utc_ms(stamp)
    return f"{username}_{stamp.replace(':', '-').replace('.', '-')}"
