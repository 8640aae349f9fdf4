"""State selectors and the poller that turns a snapshot into a StateSample."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable

from voxlog.assembler.entries import StateSample
from voxlog.assembler.schema import EQUIPMENT_KEYS, STATE_FIELD_KEYS
from voxlog.assembler.timefmt import format_utc_ms
from voxlog.capture.cadence import Cadence, ConfigError, cadence_for
from voxlog.world.avatar import Avatar, ItemStack
from voxlog.world.sim import WorldSnapshot


class FieldSelector(Enum):
    HEALTH = "health"
    HUNGER = "hunger"
    LOCATION = "location"
    VIEW = "view"
    TARGET_BLOCK = "target_block"
    RAY_TRACE_BLOCK = "ray_trace_block"
    RAY_TRACE_ENTITIES = "ray_trace_entities"
    NEARBY_ENTITIES = "nearby_entities"
    NEARBY_BLOCKS = "nearby_blocks"
    BIOME = "biome"
    HOTBAR = "hotbar"
    INVENTORY = "inventory"
    EQUIPMENT = "equipment"

    @property
    def key(self) -> str:
        """Name of the field in serialized entries."""
        return "ray_tracing_block" if self is FieldSelector.RAY_TRACE_BLOCK else self.value

    @classmethod
    def parse(cls, name: str) -> FieldSelector:
        try:
            return cls(name)
        except ValueError:
            if name == "ray_tracing_block":
                return cls.RAY_TRACE_BLOCK
            raise ConfigError(f"unknown field selector {name!r}; known: {[s.value for s in cls]}") from None


_ORDER = {key: i for i, key in enumerate(STATE_FIELD_KEYS)}


def canonical_fields(fields: Iterable[FieldSelector]) -> tuple[FieldSelector, ...]:
    return tuple(sorted(set(fields), key=lambda s: _ORDER[s.key]))


@dataclass(frozen=True)
class SelectorSettings:
    """Distances and radii for the spatial selectors."""

    nearby_blocks_radius: int = 4
    nearby_entities_radius: float = 8.0
    target_block_distance: float = 5.0
    ray_trace_distance: float = 32.0
    ray_trace_entities_distance: float = 32.0

    def __post_init__(self) -> None:
        if self.nearby_blocks_radius < 0 or self.nearby_entities_radius < 0:
            raise ConfigError("radii must be >= 0")
        for name in ("target_block_distance", "ray_trace_distance", "ray_trace_entities_distance"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")


_WORLD_DEPENDENT = frozenset(
    {
        FieldSelector.TARGET_BLOCK,
        FieldSelector.RAY_TRACE_BLOCK,
        FieldSelector.RAY_TRACE_ENTITIES,
        FieldSelector.NEARBY_ENTITIES,
        FieldSelector.NEARBY_BLOCKS,
        FieldSelector.BIOME,
    }
)


# a label such as HIGH_FREQUENCY_LOG_20Hz advertises its rate
LABEL_HZ = re.compile(r"(\d+)Hz$")


@dataclass(frozen=True)
class PollerSpec:
    label: str
    frequency_hz: int
    fields: tuple[FieldSelector, ...] = ()
    cadence: Cadence = field(init=False, compare=False, repr=False)
    world_dependent: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.label or not isinstance(self.label, str):
            raise ConfigError("poller label must be a non-empty string")
        named = LABEL_HZ.search(self.label)
        if named and int(named.group(1)) != self.frequency_hz:
            raise ConfigError(f"poller {self.label!r} names {named.group(1)} Hz but runs at {self.frequency_hz} Hz")
        object.__setattr__(self, "fields", canonical_fields(self.fields))
        object.__setattr__(self, "cadence", cadence_for(self.frequency_hz))
        object.__setattr__(self, "world_dependent", any(f in _WORLD_DEPENDENT for f in self.fields))


class ParticipantAbsent(LookupError):
    """The participant is not in the snapshot being polled."""


def _stack(stack: ItemStack | None) -> dict[str, Any] | None:
    return None if stack is None else {"item": stack.material, "amount": stack.amount}


def _block_hit(snapshot: WorldSnapshot, avatar: Avatar, distance: float) -> dict[str, Any] | None:
    hit = snapshot.ray_trace_block(avatar.position, avatar.view, distance)
    if hit is None:
        return None
    return {"hit_location": hit.hit_location.as_dict(), "block_type": hit.block_type}


_BUILDERS: dict[FieldSelector, Callable[[WorldSnapshot, Avatar, SelectorSettings], Any]] = {
    FieldSelector.HEALTH: lambda s, a, c: a.health,
    FieldSelector.HUNGER: lambda s, a, c: a.hunger,
    FieldSelector.LOCATION: lambda s, a, c: a.position.as_dict(),
    FieldSelector.VIEW: lambda s, a, c: a.view.as_dict(),
    FieldSelector.TARGET_BLOCK: lambda s, a, c: _block_hit(s, a, c.target_block_distance),
    FieldSelector.RAY_TRACE_BLOCK: lambda s, a, c: _block_hit(s, a, c.ray_trace_distance),
    FieldSelector.RAY_TRACE_ENTITIES: lambda s, a, c: [
        {"entity_id": h.entity_id, "entity_type": h.entity_type, "hit_distance": h.hit_distance}
        for h in s.ray_trace_entities(a.position, a.view, c.ray_trace_entities_distance)
    ],
    FieldSelector.NEARBY_ENTITIES: lambda s, a, c: [
        {"entity_id": e.entity_id, "entity_type": e.entity_type, "location": e.position.as_dict()}
        for e in s.nearby_entities(a.position, c.nearby_entities_radius)
    ],
    FieldSelector.NEARBY_BLOCKS: lambda s, a, c: [
        {"location": {"x": x, "y": y, "z": z}, "block_type": m}
        for (x, y, z), m in s.nearby_blocks(a.position, c.nearby_blocks_radius)
    ],
    FieldSelector.BIOME: lambda s, a, c: s.biome_at(a.position),
    FieldSelector.HOTBAR: lambda s, a, c: [_stack(st) for st in a.hotbar],
    FieldSelector.INVENTORY: lambda s, a, c: [_stack(st) for st in a.inventory],
    FieldSelector.EQUIPMENT: lambda s, a, c: dict(
        zip(EQUIPMENT_KEYS, [*(_stack(st) for st in a.armor), _stack(a.main_hand), _stack(a.off_hand)])
    ),
}


def build_payload(
    snapshot: WorldSnapshot, avatar: Avatar, fields: Iterable[FieldSelector], settings: SelectorSettings
) -> dict[str, Any]:
    return {sel.key: _BUILDERS[sel](snapshot, avatar, settings) for sel in canonical_fields(fields)}


class PayloadCache:
    """Reuses a payload while the avatar record and world versions are unchanged.

    Payloads are shared between entries, so they must be treated as
    read-only once built.
    """

    def __init__(self) -> None:
        self._slots: dict[str, tuple[Avatar, int, int, dict[str, Any]]] = {}

    def get(self, snapshot: WorldSnapshot, avatar: Avatar, spec: PollerSpec, settings: SelectorSettings) -> dict[str, Any]:
        world_dep = spec.world_dependent
        grid_v = snapshot.grid.version if world_dep else 0
        ent_v = snapshot.entities_version if world_dep else 0
        slot = self._slots.get(spec.label)
        if slot is not None and slot[0] is avatar and slot[1] == grid_v and slot[2] == ent_v:
            return slot[3]
        payload = build_payload(snapshot, avatar, spec.fields, settings)
        self._slots[spec.label] = (avatar, grid_v, ent_v, payload)
        return payload


def poll_state(
    snapshot: WorldSnapshot,
    participant: str,
    fields: Iterable[FieldSelector],
    *,
    label: str = "STATE_LOG",
    instant_ms: int | None = None,
    settings: SelectorSettings | None = None,
) -> StateSample:
    """Sample ``participant``'s selected fields from a committed snapshot.

    ``instant_ms`` is the simulated sample time (ms since epoch); it defaults
    to the snapshot tick's start. The entry's game_tick is the snapshot's.
    """
    avatar = snapshot.avatars.get(participant)
    if avatar is None:
        raise ParticipantAbsent(participant)
    clock = snapshot.clock
    if instant_ms is None:
        instant_ms = clock.tick * clock.tick_ms
    absolute = clock.epoch_ms + instant_ms
    payload = build_payload(snapshot, avatar, fields, settings or SelectorSettings())
    return StateSample(label, format_utc_ms(absolute), clock.tick, payload, instant_ms=absolute, actor=participant)
