"""Fixed-width ISO-8601 UTC timestamps with millisecond precision."""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone
from functools import lru_cache

_UNIX = datetime(1970, 1, 1, tzinfo=timezone.utc)
_STAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{3}Z$")


@lru_cache(maxsize=1 << 16)
def format_utc_ms(unix_ms: int) -> str:
    """``2025-01-01T00:00:00.000Z`` for an absolute millisecond count."""
    moment = _UNIX + timedelta(milliseconds=unix_ms)
    return moment.strftime("%Y-%m-%dT%H:%M:%S") + f".{unix_ms % 1000:03d}Z"


@lru_cache(maxsize=1 << 16)
def parse_utc_ms(stamp: str) -> int:
    if not isinstance(stamp, str) or not _STAMP_RE.match(stamp):
        raise ValueError(f"timestamp {stamp!r} is not YYYY-MM-DDTHH:MM:SS.mmmZ")
    moment = datetime.fromisoformat(stamp[:-1]).replace(tzinfo=timezone.utc)
    delta = moment - _UNIX
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


def parse_utc(stamp: str) -> datetime:
    return _UNIX + timedelta(milliseconds=parse_utc_ms(stamp))
