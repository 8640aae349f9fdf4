"""Run configuration: one TOML file, versioned by ``config_version``.

Version 1 layout::

    config_version = 1
    plugin_version = "0.1.0"        # optional, defaults to the package version
    scenario = "scenario.txt"       # relative to this file
    output_dir = "out"              # relative to this file
    duration_s = 60                 # or: ticks = 1200
    epoch = "2025-01-01T00:00:00.000Z"
    logfile_seed = 7                # optional; makes logfile_id reproducible
    queue_capacity = 65536
    drain_every_ticks = 20          # 0 drains only when a session stops

    [events]
    enabled = true
    kinds = ["BlockBreak", "ItemConsume"]   # optional filter

    [selectors]
    nearby_blocks_radius = 4
    nearby_entities_radius = 8.0
    target_block_distance = 5.0
    ray_trace_distance = 32.0
    ray_trace_entities_distance = 32.0

    [[pollers]]
    label = "HIGH_FREQUENCY_LOG_20Hz"
    frequency_hz = 20
    fields = ["location", "view", "ray_trace_block"]

    [transport]                     # optional
    endpoint = "127.0.0.1:9400"
    attempts = 3
    backoff_ms = [100, 200, 400]
    timeout_s = 10.0
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from voxlog import PLUGIN_VERSION
from voxlog.assembler.timefmt import parse_utc
from voxlog.capture.cadence import ConfigError
from voxlog.capture.pipeline import CaptureConfig
from voxlog.capture.poller import FieldSelector, PollerSpec, SelectorSettings
from voxlog.capture.queue import DEFAULT_CAPACITY
from voxlog.transport.client import Endpoint, RetryPolicy
from voxlog.world.events import EventKind
from voxlog.world.sim import TICK_RATE

CONFIG_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    scenario: Path
    output_dir: Path
    ticks: int
    capture: CaptureConfig
    plugin_version: str = PLUGIN_VERSION
    epoch: datetime | None = None  # None: the scenario's epoch, else the default
    logfile_seed: int | None = None
    drain_every_ticks: int = 20
    endpoint: Endpoint | None = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    def __post_init__(self) -> None:
        if self.ticks <= 0:
            raise ConfigError("duration must be > 0")
        if not self.capture.pollers and not self.capture.capture_events:
            raise ConfigError("enable at least one poller or event capture")
        if self.drain_every_ticks < 0:
            raise ConfigError("drain_every_ticks must be >= 0")

    def with_overrides(self, **changes: Any) -> RunConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _line_of(text: str, key: str, table: str | None = None, index: int = 0) -> int | None:
    """Line of ``key``; inside the ``index``-th ``[[table]]`` block when ``table`` is given.

    Falls back to the block header when the key is not written out.
    """
    pattern = re.compile(rf"^\s*\[*\s*{re.escape(key)}\b")
    lines = list(enumerate(text.splitlines(), start=1))
    if table is None:
        return next((n for n, line in lines if pattern.match(line)), None)
    header = re.compile(rf"^\s*\[\[\s*{re.escape(table)}\s*\]\]")
    starts = [i for i, (_, line) in enumerate(lines) if header.match(line)]
    if index >= len(starts):
        return None
    for n, line in lines[starts[index] + 1 :]:
        if line.lstrip().startswith("["):
            break
        if pattern.match(line):
            return n
    return lines[starts[index]][0]


class ConfigFileError(ConfigError):
    def __init__(self, path: Path | str, message: str, line: int | None = None):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.line = line


_TOP_KEYS = {
    "config_version",
    "plugin_version",
    "scenario",
    "output_dir",
    "duration_s",
    "ticks",
    "epoch",
    "logfile_seed",
    "queue_capacity",
    "drain_every_ticks",
    "events",
    "selectors",
    "pollers",
    "transport",
}


def _expect(value: Any, kind: type | tuple[type, ...], name: str) -> Any:
    if isinstance(value, bool) and kind is not bool and bool not in (kind if isinstance(kind, tuple) else (kind,)):
        raise ConfigError(f"{name} has the wrong type")
    if not isinstance(value, kind):
        raise ConfigError(f"{name} has the wrong type")
    return value


def parse_config(text: str, path: Path | str = "<config>") -> RunConfig:
    path = Path(path)
    base = path.parent if str(path) != "<config>" else Path.cwd()
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise ConfigFileError(path, f"not valid TOML: {exc}", int(match.group(1)) if match else None) from None

    current_key: str | tuple[str, int, str] = "config"
    try:
        for key in raw:
            if key not in _TOP_KEYS:
                current_key = key
                raise ConfigError(f"unknown key {key!r}")
        current_key = "config_version"
        version = raw.get("config_version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"config_version {version!r} is not supported (expected {CONFIG_VERSION})")

        pollers = []
        for i, entry in enumerate(raw.get("pollers", [])):
            current_key = ("pollers", i, "pollers")
            _expect(entry, dict, f"pollers[{i}]")
            unknown = set(entry) - {"label", "frequency_hz", "fields"}
            if unknown:
                current_key = ("pollers", i, sorted(unknown)[0])
                raise ConfigError(f"pollers[{i}] has unknown keys {sorted(unknown)}")
            current_key = ("pollers", i, "fields")
            fields = tuple(FieldSelector.parse(f) for f in _expect(entry.get("fields", []), list, f"pollers[{i}].fields"))
            current_key = ("pollers", i, "frequency_hz")
            pollers.append(PollerSpec(_expect(entry.get("label"), str, f"pollers[{i}].label"), entry.get("frequency_hz"), fields))

        current_key = "selectors"
        settings = SelectorSettings(**_expect(raw.get("selectors", {}), dict, "selectors"))

        current_key = "events"
        events = _expect(raw.get("events", {}), dict, "events")
        kinds = None
        if "kinds" in events:
            names = {k.value: k for k in EventKind}
            try:
                kinds = frozenset(names[k] for k in events["kinds"])
            except KeyError as exc:
                raise ConfigError(f"unknown event kind {exc.args[0]!r}; known: {sorted(names)}") from None

        current_key = "queue_capacity"
        capture = CaptureConfig(
            pollers=tuple(pollers),
            settings=settings,
            queue_capacity=_expect(raw.get("queue_capacity", DEFAULT_CAPACITY), int, "queue_capacity"),
            capture_events=_expect(events.get("enabled", True), bool, "events.enabled"),
            event_kinds=kinds,
        )

        current_key = "ticks"
        if "ticks" in raw and "duration_s" in raw:
            ticks_line, duration_line = _line_of(text, "ticks") or 0, _line_of(text, "duration_s") or 0
            current_key = "ticks" if ticks_line > duration_line else "duration_s"
            raise ConfigError("give either ticks or duration_s, not both")
        if "ticks" in raw:
            ticks = _expect(raw["ticks"], int, "ticks")
        else:
            current_key = "duration_s"
            duration = _expect(raw.get("duration_s", 60), (int, float), "duration_s")
            ticks = round(duration * TICK_RATE)
            if abs(ticks - duration * TICK_RATE) > 1e-9:
                raise ConfigError("duration_s must be a whole number of ticks (multiple of 0.05 s)")

        current_key = "scenario"
        if "scenario" not in raw:
            raise ConfigError("scenario is required")
        scenario = base / _expect(raw["scenario"], str, "scenario")
        current_key = "output_dir"
        output_dir = base / _expect(raw.get("output_dir", "out"), str, "output_dir")
        current_key = "epoch"
        epoch = parse_utc(raw["epoch"]) if "epoch" in raw else None

        current_key = "transport"
        endpoint = None
        retry = RetryPolicy()
        if "transport" in raw:
            t = _expect(raw["transport"], dict, "transport")
            endpoint = Endpoint.parse(_expect(t["endpoint"], str, "transport.endpoint"))
            retry = RetryPolicy(
                attempts=_expect(t.get("attempts", 3), int, "transport.attempts"),
                backoff_ms=tuple(t.get("backoff_ms", (100, 200, 400))),
                timeout_s=float(t.get("timeout_s", 10.0)),
            )
            if retry.attempts < 1:
                raise ConfigError("transport.attempts must be >= 1")

        current_key = "logfile_seed"
        seed = raw.get("logfile_seed")
        if seed is not None:
            _expect(seed, int, "logfile_seed")
        current_key = "drain_every_ticks"
        return RunConfig(
            scenario=scenario,
            output_dir=output_dir,
            ticks=ticks,
            capture=capture,
            plugin_version=_expect(raw.get("plugin_version", PLUGIN_VERSION), str, "plugin_version"),
            epoch=epoch,
            logfile_seed=seed,
            drain_every_ticks=_expect(raw.get("drain_every_ticks", 20), int, "drain_every_ticks"),
            endpoint=endpoint,
            retry=retry,
        )
    except ConfigFileError:
        raise
    except (ConfigError, ValueError, TypeError, KeyError) as exc:
        message = str(exc) if not isinstance(exc, KeyError) else f"missing key {exc}"
        if isinstance(current_key, tuple):
            table, index, key = current_key
            line = _line_of(text, key, table, index)
        else:
            line = _line_of(text, current_key)
        raise ConfigFileError(path, message, line) from None


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFileError(path, f"cannot read config: {exc.strerror}") from None
    return parse_config(text, path)
