"""Structural rules for session documents.

Validation collects every violation rather than stopping at the first, so
``validate`` reports can show a whole file's problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from voxlog.assembler.entries import EVENT_LOG, METADATA_KEYS
from voxlog.assembler.timefmt import parse_utc_ms
from voxlog.world.events import EVENT_FIELDS, EVENT_NAME_TO_KIND

# Serialized state field names in canonical emission order.
STATE_FIELD_KEYS = (
    "health",
    "hunger",
    "location",
    "view",
    "target_block",
    "ray_tracing_block",
    "ray_trace_entities",
    "nearby_entities",
    "nearby_blocks",
    "biome",
    "hotbar",
    "inventory",
    "equipment",
)
EQUIPMENT_KEYS = ("helmet", "chestplate", "leggings", "boots", "main_hand", "off_hand")


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str

    def __str__(self) -> str:
        return f"{self.path}: {self.rule}"


class SchemaError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        head = str(violations[0])
        more = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
        super().__init__(head + more)

    @property
    def path(self) -> str:
        return self.violations[0].path


Check = Callable[[Any, str, list[Violation]], None]


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v: Any) -> bool:
    return (isinstance(v, (int, float))) and not isinstance(v, bool)


def _string(v: Any, path: str, out: list[Violation]) -> None:
    if not isinstance(v, str):
        out.append(Violation(path, "must be a string"))


def _number(v: Any, path: str, out: list[Violation]) -> None:
    if not _is_number(v):
        out.append(Violation(path, "must be a number"))


def _integer(v: Any, path: str, out: list[Violation]) -> None:
    if not _is_int(v):
        out.append(Violation(path, "must be an integer"))


def _positive_int(v: Any, path: str, out: list[Violation]) -> None:
    if not _is_int(v) or v <= 0:
        out.append(Violation(path, "must be a positive integer"))


def _obj(keys: tuple[str, ...], checks: dict[str, Check]) -> Check:
    def check(v: Any, path: str, out: list[Violation]) -> None:
        if not isinstance(v, dict):
            out.append(Violation(path, f"must be an object with keys {list(keys)}"))
            return
        if set(v) != set(keys):
            out.append(Violation(path, f"keys must be exactly {list(keys)}, got {list(v)}"))
        for key in keys:
            if key in v:
                checks[key](v[key], f"{path}.{key}", out)

    return check


def _nullable(inner: Check) -> Check:
    def check(v: Any, path: str, out: list[Violation]) -> None:
        if v is not None:
            inner(v, path, out)

    return check


def _array(inner: Check, length: int | None = None) -> Check:
    def check(v: Any, path: str, out: list[Violation]) -> None:
        if not isinstance(v, list):
            out.append(Violation(path, "must be an array"))
            return
        if length is not None and len(v) != length:
            out.append(Violation(path, f"must have exactly {length} elements"))
        for i, item in enumerate(v):
            inner(item, f"{path}[{i}]", out)

    return check


_xyz = _obj(("x", "y", "z"), {"x": _number, "y": _number, "z": _number})
_block_xyz = _obj(("x", "y", "z"), {"x": _integer, "y": _integer, "z": _integer})
_stack = _nullable(_obj(("item", "amount"), {"item": _string, "amount": _positive_int}))
_block_hit = _nullable(_obj(("hit_location", "block_type"), {"hit_location": _xyz, "block_type": _string}))

STATE_FIELD_CHECKS: dict[str, Check] = {
    "health": _number,
    "hunger": _number,
    "location": _xyz,
    "view": _obj(("pitch", "yaw"), {"pitch": _number, "yaw": _number}),
    "target_block": _block_hit,
    "ray_tracing_block": _block_hit,
    "ray_trace_entities": _array(
        _obj(
            ("entity_id", "entity_type", "hit_distance"),
            {"entity_id": _integer, "entity_type": _string, "hit_distance": _number},
        )
    ),
    "nearby_entities": _array(
        _obj(("entity_id", "entity_type", "location"), {"entity_id": _integer, "entity_type": _string, "location": _xyz})
    ),
    "nearby_blocks": _array(_obj(("location", "block_type"), {"location": _block_xyz, "block_type": _string})),
    "biome": _string,
    "hotbar": _array(_stack, 9),
    "inventory": _array(_stack, 36),
    "equipment": _obj(EQUIPMENT_KEYS, {k: _stack for k in EQUIPMENT_KEYS}),
}

EVENT_VALUE_CHECKS: dict[str, Check] = {
    "player": _string,
    "event": _string,
    "block_type": _string,
    "block_location": _block_xyz,
    "item_in_hand": _string,
    "action": _string,
    "entity_type": _string,
    "damage": _number,
    "item": _string,
    "new_item": _string,
    "item_type": _string,
    "amount": _positive_int,
    "slot": _integer,
    "clicked_item": _string,
    "crafted_item": _string,
}


def check_timestamp(v: Any, path: str, out: list[Violation]) -> None:
    try:
        parse_utc_ms(v)
    except (TypeError, ValueError):
        out.append(Violation(path, "must be a UTC timestamp YYYY-MM-DDTHH:MM:SS.mmmZ"))


def check_event_info(event: str, info: Any, path: str, out: list[Violation]) -> None:
    if not isinstance(info, dict):
        out.append(Violation(path, "must be an object"))
        return
    kind = EVENT_NAME_TO_KIND.get(event)
    if kind is None:
        # unrecognised events still need attribution
        for key in ("player", "event"):
            if key not in info:
                out.append(Violation(f"{path}.{key}", "required for every event"))
    else:
        expected = EVENT_FIELDS[kind]
        if set(info) != set(expected):
            missing = [k for k in expected if k not in info]
            extra = [k for k in info if k not in expected]
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unexpected {extra}")
            out.append(Violation(path, f"{event} fields must be exactly {list(expected)} ({'; '.join(detail)})"))
    for key, value in info.items():
        check = EVENT_VALUE_CHECKS.get(key)
        if check is None:
            continue
        if key == "block_location" and value is None and event == "PlayerInteractEvent":
            continue
        check(value, f"{path}.{key}", out)
    if "event" in info and info["event"] != event:
        out.append(Violation(f"{path}.event", f"must equal the entry event {event!r}"))


def check_entry(entry: Any, path: str, out: list[Violation]) -> None:
    if not isinstance(entry, dict):
        out.append(Violation(path, "must be an object"))
        return
    for key in ("type", "time", "game_tick"):
        if key not in entry:
            out.append(Violation(f"{path}.{key}", "required"))
    etype = entry.get("type")
    if "type" in entry and (not isinstance(etype, str) or not etype):
        out.append(Violation(f"{path}.type", "must be a non-empty string"))
    if "time" in entry:
        check_timestamp(entry["time"], f"{path}.time", out)
    if "game_tick" in entry and (not _is_int(entry["game_tick"]) or entry["game_tick"] < 0):
        out.append(Violation(f"{path}.game_tick", "must be a non-negative integer"))
    if etype == EVENT_LOG:
        keys = list(entry)
        if keys != ["type", "time", "game_tick", "event", "event_info"]:
            out.append(Violation(path, "event entries must have exactly type, time, game_tick, event, event_info"))
        event = entry.get("event")
        if not isinstance(event, str) or not event:
            out.append(Violation(f"{path}.event", "must be a non-empty string"))
            return
        if "event_info" in entry:
            check_event_info(event, entry["event_info"], f"{path}.event_info", out)
    else:
        for key, value in entry.items():
            if key in ("type", "time", "game_tick"):
                continue
            check = STATE_FIELD_CHECKS.get(key)
            if check is None:
                out.append(Violation(f"{path}.{key}", f"unknown state field; known: {list(STATE_FIELD_KEYS)}"))
            else:
                check(value, f"{path}.{key}", out)


def check_document(doc: Any) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(doc, dict):
        return [Violation("$", "document must be a JSON object")]
    for key in METADATA_KEYS:
        if key not in doc:
            out.append(Violation(f"$.{key}", "required metadata field is missing"))
        elif not isinstance(doc[key], str):
            out.append(Violation(f"$.{key}", "must be a string"))
    for key in ("game_start_time", "game_end_time"):
        if isinstance(doc.get(key), str):
            check_timestamp(doc[key], f"$.{key}", out)
    if not any(v.path in ("$.game_start_time", "$.game_end_time") for v in out) and all(
        isinstance(doc.get(k), str) for k in ("game_start_time", "game_end_time")
    ):
        if parse_utc_ms(doc["game_end_time"]) < parse_utc_ms(doc["game_start_time"]):
            out.append(Violation("$.game_end_time", "must not precede game_start_time"))
    filename = doc.get("filename")
    if isinstance(filename, str) and (not filename or any(c in filename for c in "/\\\0")):
        out.append(Violation("$.filename", "must be a non-empty name without path separators"))
    if "dropped_entries" in doc and (not _is_int(doc["dropped_entries"]) or doc["dropped_entries"] < 0):
        out.append(Violation("$.dropped_entries", "must be a non-negative integer"))
    known = {*METADATA_KEYS, "dropped_entries", "logs"}
    for key in doc:
        if key not in known:
            out.append(Violation(f"$.{key}", "unknown top-level key"))
    if "logs" not in doc:
        out.append(Violation("$.logs", "required"))
    elif not isinstance(doc["logs"], list):
        out.append(Violation("$.logs", "must be an array"))
    else:
        for i, entry in enumerate(doc["logs"]):
            check_entry(entry, f"$.logs[{i}]", out)
    return out
