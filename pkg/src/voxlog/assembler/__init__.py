"""Chronological assembly and the session-document JSON format."""

from voxlog.assembler.codec import (
    AssemblyError,
    SessionParseError,
    encode_document,
    load_json,
    merge_entries,
    parse_session,
    serialize_session,
    session_filename,
)
from voxlog.assembler.entries import (
    DOCUMENT_KEYS,
    EVENT_LOG,
    METADATA_KEYS,
    EventRecord,
    LogEntry,
    SessionDocument,
    SessionMetadata,
    StateSample,
)
from voxlog.assembler.schema import STATE_FIELD_KEYS, SchemaError, Violation, check_document
from voxlog.assembler.timefmt import format_utc_ms, parse_utc_ms

__all__ = [
    "DOCUMENT_KEYS",
    "EVENT_LOG",
    "METADATA_KEYS",
    "STATE_FIELD_KEYS",
    "AssemblyError",
    "EventRecord",
    "LogEntry",
    "SchemaError",
    "SessionDocument",
    "SessionMetadata",
    "SessionParseError",
    "StateSample",
    "Violation",
    "check_document",
    "encode_document",
    "format_utc_ms",
    "load_json",
    "merge_entries",
    "parse_session",
    "parse_utc_ms",
    "serialize_session",
    "session_filename",
]
