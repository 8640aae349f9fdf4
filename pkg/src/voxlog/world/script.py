"""Per-agent action schedules that stand in for live players."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from voxlog.world.grid import check_material


class ScenarioError(Exception):
    """A script that cannot be applied to the world it runs against."""

    def __init__(self, message: str, *, agent: str | None = None, tick: int | None = None, line: int | None = None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if tick is not None:
            prefix.append(f"tick {tick}")
        if agent is not None:
            prefix.append(f"agent {agent!r}")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)
        self.agent = agent
        self.tick = tick
        self.line = line


def _material(token: str) -> str:
    return check_material(token)


def _slot(token: str) -> int:
    value = int(token)
    if not 0 <= value < 36:
        raise ValueError(f"slot {value} outside [0, 35]")
    return value


def _hotbar_slot(token: str) -> int:
    value = int(token)
    if not 0 <= value < 9:
        raise ValueError(f"hotbar slot {value} outside [0, 8]")
    return value


def _positive_int(token: str) -> int:
    value = int(token)
    if value <= 0:
        raise ValueError(f"expected a positive integer, got {value}")
    return value


def _non_negative(token: str) -> float:
    value = float(token)
    if not value >= 0:
        raise ValueError(f"expected a non-negative number, got {token}")
    return value


# verb -> (required converters, optional converters)
ACTION_SIGNATURES: dict[str, tuple[tuple[Callable[[str], Any], ...], tuple[Callable[[str], Any], ...]]] = {
    "move": ((float, float, float), (_non_negative,)),
    "turn": ((float, float), ()),
    "break": ((int, int, int), ()),
    "mine": ((int, int, int), ()),
    "place": ((int, int, int, _material), ()),
    "interact": ((_material,), (int, int, int)),
    "interact-entity": ((int,), ()),
    "attack": ((int, _non_negative), ()),
    "hurt": ((_non_negative,), (_material,)),
    "consume": ((), ()),
    "hold": ((_hotbar_slot,), ()),
    "drop": ((_slot, _positive_int), ()),
    "pickup": ((_material, _positive_int), ()),
    "click": ((_slot,), ()),
    "craft": ((_material, _positive_int), ()),
}

DEFAULT_WALK_SPEED = 0.2  # blocks per tick


@dataclass(frozen=True, slots=True)
class Action:
    verb: str
    args: tuple[Any, ...] = ()

    @classmethod
    def parse(cls, verb: str, tokens: Iterable[str]) -> Action:
        if verb not in ACTION_SIGNATURES:
            raise ValueError(f"unknown action {verb!r}")
        required, optional = ACTION_SIGNATURES[verb]
        tokens = list(tokens)
        if len(tokens) < len(required) or len(tokens) > len(required) + len(optional):
            raise ValueError(f"{verb} takes {len(required)} to {len(required) + len(optional)} arguments, got {len(tokens)}")
        if verb == "interact" and len(tokens) not in (1, 4):
            raise ValueError("interact takes an action name and optionally x y z")
        converters = required + optional
        return cls(verb, tuple(conv(tok) for conv, tok in zip(converters, tokens)))


class ScenarioScript:
    """Ordered ``(tick, action)`` lists keyed by agent name."""

    def __init__(self, schedules: dict[str, list[tuple[int, Action]]] | None = None):
        self._by_tick: dict[int, list[tuple[str, Action]]] = defaultdict(list)
        self.schedules: dict[str, list[tuple[int, Action]]] = {}
        for agent, items in (schedules or {}).items():
            for tick, action in items:
                self.add(agent, tick, action)

    def add(self, agent: str, tick: int, action: Action) -> None:
        items = self.schedules.setdefault(agent, [])
        if tick < 0:
            raise ScenarioError("negative tick", agent=agent, tick=tick)
        if items and tick < items[-1][0]:
            raise ScenarioError(f"ticks must be non-decreasing (previous {items[-1][0]})", agent=agent, tick=tick)
        items.append((tick, action))
        self._by_tick[tick].append((agent, action))

    def actions_at(self, tick: int) -> list[tuple[str, Action]]:
        """Actions for ``tick`` ordered by agent name, then script order."""
        scheduled = self._by_tick.get(tick)
        if not scheduled:
            return []
        return sorted(scheduled, key=lambda pair: pair[0])

    def __len__(self) -> int:
        return sum(len(v) for v in self.schedules.values())

    def last_tick(self) -> int:
        return max(self._by_tick, default=0)
