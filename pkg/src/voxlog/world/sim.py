"""Deterministic tick loop for the simulated voxel world."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from types import MappingProxyType
from typing import Mapping

from voxlog.world.avatar import MAX_HUNGER, Avatar, ItemStack, stack_material
from voxlog.world.events import DAMAGE_DEALT, DAMAGE_RECEIVED, EventKind, GameEvent
from voxlog.world.geometry import ZERO, Vec3, ViewAngles
from voxlog.world.grid import AIR, BlockGrid, Coord, EntityRec, nearby_entities
from voxlog.world.raytrace import BlockHit, EntityHit, ray_trace_block, ray_trace_entities
from voxlog.world.script import DEFAULT_WALK_SPEED, Action, ScenarioError, ScenarioScript

TICK_RATE = 20
TICK_MS = 1000 // TICK_RATE
FOOD_VALUE = 4.0
DEFAULT_EPOCH = datetime(2025, 1, 1, tzinfo=timezone.utc)


def epoch_to_ms(epoch: datetime) -> int:
    if epoch.tzinfo is None:
        raise ValueError("epoch must be timezone-aware")
    delta = epoch - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


@dataclass(frozen=True, slots=True)
class WorldClock:
    epoch_ms: int
    tick: int = 0
    tick_rate: int = TICK_RATE

    @property
    def tick_ms(self) -> int:
        return 1000 // self.tick_rate

    def time_ms(self, tick: int | None = None) -> int:
        """Absolute UTC milliseconds of ``tick`` (default: the current tick)."""
        return self.epoch_ms + (self.tick if tick is None else tick) * self.tick_ms

    def advanced(self) -> WorldClock:
        return WorldClock(self.epoch_ms, self.tick + 1, self.tick_rate)


class _Queries:
    grid: BlockGrid
    entities: Mapping[int, EntityRec]

    def ray_trace_block(self, origin: Vec3, view: ViewAngles, max_distance: float) -> BlockHit | None:
        return ray_trace_block(self.grid, origin, view, max_distance)

    def ray_trace_entities(self, origin: Vec3, view: ViewAngles, max_distance: float) -> list[EntityHit]:
        return ray_trace_entities(self.entities.values(), origin, view, max_distance)

    def nearby_blocks(self, center: Vec3, radius: int) -> list[tuple[Coord, str]]:
        return self.grid.nearby_blocks(center, radius)

    def nearby_entities(self, center: Vec3, radius: float) -> list[EntityRec]:
        return nearby_entities(dict(self.entities), center, radius)

    def biome_at(self, position: Vec3) -> str:
        return self.grid.biome_at(position)


@dataclass(frozen=True)
class WorldSnapshot(_Queries):
    """Committed, read-only state at one tick; safe to share across threads."""

    clock: WorldClock
    avatars: Mapping[str, Avatar]
    entities: Mapping[int, EntityRec]
    grid: BlockGrid
    entities_version: int

    @property
    def tick(self) -> int:
        return self.clock.tick


class World(_Queries):
    """Mutable world state. Only :meth:`advance_tick` and setup calls change it."""

    def __init__(self, epoch: datetime = DEFAULT_EPOCH, tick_rate: int = TICK_RATE):
        if 1000 % tick_rate:
            raise ValueError("tick rate must divide 1000")
        self.clock = WorldClock(epoch_to_ms(epoch), 0, tick_rate)
        self.grid = BlockGrid()
        self.entities: dict[int, EntityRec] = {}
        self.avatars: dict[str, Avatar] = {}
        self.entities_version = 0
        self._snapshot: WorldSnapshot | None = None
        self._frozen_grid: BlockGrid | None = None
        self._frozen_entities: Mapping[int, EntityRec] | None = None
        self._snapshot_entities_version = -1

    @property
    def tick(self) -> int:
        return self.clock.tick

    # -- setup -----------------------------------------------------------
    def add_avatar(self, avatar: Avatar) -> None:
        if avatar.name in self.avatars:
            raise ValueError(f"avatar {avatar.name!r} already present")
        self.avatars[avatar.name] = avatar
        self._snapshot = None

    def remove_avatar(self, name: str) -> Avatar:
        avatar = self.avatars.pop(name)
        self._snapshot = None
        return avatar

    def add_entity(self, entity: EntityRec) -> None:
        if entity.entity_id in self.entities:
            raise ValueError(f"duplicate entity id {entity.entity_id}")
        self.entities[entity.entity_id] = entity
        self.entities_version += 1
        self._snapshot = None

    def set_block(self, coord: Coord, material: str) -> None:
        self.grid.set_block(coord, material)
        self._snapshot = None

    def set_biome(self, x: int, z: int, biome: str) -> None:
        self.grid.set_biome(x, z, biome)
        self._snapshot = None

    # -- tick loop -------------------------------------------------------
    def advance_tick(self, script: ScenarioScript | None = None) -> list[GameEvent]:
        """Advance one tick: apply scripted actions in agent order, then physics."""
        tick = self.clock.tick + 1
        events: list[GameEvent] = []
        if script is not None:
            for agent, action in script.actions_at(tick):
                if agent not in self.avatars:
                    raise ScenarioError("script references an agent that is not in the world", agent=agent, tick=tick)
                self._apply(agent, action, tick, events)
        for name in sorted(self.avatars):
            avatar = self.avatars[name]
            if avatar.waypoint is not None or avatar.velocity != ZERO:
                self.avatars[name] = _integrate(avatar)
        self.clock = self.clock.advanced()
        self._snapshot = None
        return events

    def snapshot(self) -> WorldSnapshot:
        if self._snapshot is None:
            if self._frozen_grid is None or self._frozen_grid.version != self.grid.version:
                self._frozen_grid = self.grid.frozen_copy()
            if self._frozen_entities is None or self._snapshot_entities_version != self.entities_version:
                self._frozen_entities = MappingProxyType(dict(self.entities))
                self._snapshot_entities_version = self.entities_version
            self._snapshot = WorldSnapshot(
                self.clock,
                MappingProxyType(dict(self.avatars)),
                self._frozen_entities,
                self._frozen_grid,
                self.entities_version,
            )
        return self._snapshot

    def _apply(self, name: str, action: Action, tick: int, events: list[GameEvent]) -> None:
        avatar = self.avatars[name]
        args = action.args
        verb = action.verb

        def emit(kind: EventKind, event_name: str | None = None, **fields: object) -> None:
            events.append(GameEvent.build(tick, name, kind, event_name, **fields))

        def fail(message: str) -> ScenarioError:
            return ScenarioError(message, agent=name, tick=tick)

        if verb == "move":
            speed = args[3] if len(args) > 3 else DEFAULT_WALK_SPEED
            self.avatars[name] = avatar.evolve(waypoint=Vec3(*args[:3]), speed=speed)
        elif verb == "turn":
            self.avatars[name] = avatar.evolve(view=ViewAngles(args[0], args[1]))
        elif verb in ("break", "mine"):
            coord = (args[0], args[1], args[2])
            material = self.grid.material_at(*coord)
            if material == AIR:
                raise fail(f"no block to {verb} at {coord}")
            location = {"x": coord[0], "y": coord[1], "z": coord[2]}
            if verb == "break":
                self.grid.set_block(coord, AIR)
                emit(EventKind.BLOCK_BREAK, block_type=material, block_location=location)
            else:
                emit(
                    EventKind.BLOCK_DAMAGE,
                    block_type=material,
                    block_location=location,
                    item_in_hand=stack_material(avatar.main_hand),
                )
        elif verb == "place":
            coord = (args[0], args[1], args[2])
            material = args[3]
            if self.grid.material_at(*coord) != AIR:
                raise fail(f"cannot place into occupied voxel {coord}")
            self.grid.set_block(coord, material)
            held = avatar.main_hand
            if held is not None and held.material == material:
                self.avatars[name] = avatar.with_slot(avatar.held_slot, ItemStack(material, held.amount - 1))
            emit(EventKind.BLOCK_PLACE, block_type=material, block_location={"x": coord[0], "y": coord[1], "z": coord[2]})
        elif verb == "interact":
            if len(args) == 4:
                coord = (args[1], args[2], args[3])
                block_type = self.grid.material_at(*coord)
                location: dict[str, int] | None = {"x": coord[0], "y": coord[1], "z": coord[2]}
            else:
                block_type, location = AIR, None
            emit(
                EventKind.PLAYER_INTERACT,
                action=args[0],
                item_in_hand=stack_material(avatar.main_hand),
                block_type=block_type,
                block_location=location,
            )
        elif verb == "interact-entity":
            entity = self._entity(args[0], fail)
            emit(EventKind.ENTITY_INTERACT, entity_type=entity.entity_type)
        elif verb == "attack":
            entity = self._entity(args[0], fail)
            damage = float(args[1])
            self.entities[entity.entity_id] = EntityRec(
                entity.entity_id, entity.entity_type, entity.position, max(0.0, entity.health - damage), entity.max_health
            )
            self.entities_version += 1
            emit(EventKind.ENTITY_DAMAGE, DAMAGE_DEALT, entity_type=entity.entity_type, damage=damage)
        elif verb == "hurt":
            damage = float(args[0])
            source = args[1] if len(args) > 1 else "GENERIC"
            self.avatars[name] = avatar.evolve(health=max(0.0, avatar.health - damage))
            emit(EventKind.ENTITY_DAMAGE, DAMAGE_RECEIVED, entity_type=source, damage=damage)
        elif verb == "consume":
            held = avatar.main_hand
            if held is None:
                raise fail("nothing held to consume")
            updated = avatar.with_slot(avatar.held_slot, ItemStack(held.material, held.amount - 1))
            self.avatars[name] = updated.evolve(hunger=min(MAX_HUNGER, avatar.hunger + FOOD_VALUE))
            emit(EventKind.ITEM_CONSUME, item=held.material)
        elif verb == "hold":
            self.avatars[name] = avatar.evolve(held_slot=args[0])
            emit(EventKind.ITEM_HELD, new_item=stack_material(avatar.inventory[args[0]]))
        elif verb == "drop":
            slot, amount = args
            stack = avatar.inventory[slot]
            if stack is None:
                raise fail(f"slot {slot} is empty")
            amount = min(amount, stack.amount)
            self.avatars[name] = avatar.with_slot(slot, ItemStack(stack.material, stack.amount - amount))
            emit(EventKind.ITEM_DROP, item_type=stack.material, amount=amount)
        elif verb == "pickup":
            material, amount = args
            self.avatars[name] = _store(avatar, material, amount, fail)
            emit(EventKind.ITEM_PICKUP, item_type=material, amount=amount)
        elif verb == "click":
            emit(EventKind.INVENTORY_CLICK, slot=args[0], clicked_item=stack_material(avatar.inventory[args[0]]))
        elif verb == "craft":
            material, amount = args
            self.avatars[name] = _store(avatar, material, amount, fail)
            emit(EventKind.CRAFT, crafted_item=material, amount=amount)
        else:  # pragma: no cover - Action.parse rejects unknown verbs
            raise fail(f"unknown action {verb!r}")

    def _entity(self, entity_id: int, fail) -> EntityRec:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise fail(f"no entity with id {entity_id}") from None


def _store(avatar: Avatar, material: str, amount: int, fail) -> Avatar:
    slots = avatar.inventory
    for i, stack in enumerate(slots):
        if stack is not None and stack.material == material:
            return avatar.with_slot(i, ItemStack(material, stack.amount + amount))
    for i, stack in enumerate(slots):
        if stack is None:
            return avatar.with_slot(i, ItemStack(material, amount))
    raise fail("inventory full")


def _integrate(avatar: Avatar) -> Avatar:
    if avatar.waypoint is None:
        return avatar.evolve(position=avatar.position + avatar.velocity)
    delta = avatar.waypoint - avatar.position
    distance = delta.norm()
    # zero speed means teleport
    if avatar.speed <= 0 or distance <= avatar.speed:
        return avatar.evolve(position=avatar.waypoint, velocity=ZERO, waypoint=None)
    velocity = delta.scaled(avatar.speed / distance)
    return avatar.evolve(position=avatar.position + velocity, velocity=velocity)
