"""Discrete participant interactions and the exact payload each one carries."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class EventKind(Enum):
    BLOCK_BREAK = "BlockBreak"
    BLOCK_DAMAGE = "BlockDamage"
    BLOCK_PLACE = "BlockPlace"
    PLAYER_INTERACT = "PlayerInteract"
    ENTITY_INTERACT = "EntityInteract"
    ENTITY_DAMAGE = "EntityDamage"
    ITEM_CONSUME = "ItemConsume"
    ITEM_HELD = "ItemHeld"
    ITEM_DROP = "ItemDrop"
    ITEM_PICKUP = "ItemPickup"
    INVENTORY_CLICK = "InventoryClick"
    CRAFT = "Craft"


# Payload key sets, in emission order.
EVENT_FIELDS: dict[EventKind, tuple[str, ...]] = {
    EventKind.BLOCK_BREAK: ("player", "event", "block_type", "block_location"),
    EventKind.BLOCK_DAMAGE: ("player", "event", "block_type", "block_location", "item_in_hand"),
    EventKind.BLOCK_PLACE: ("player", "event", "block_type", "block_location"),
    EventKind.PLAYER_INTERACT: ("player", "event", "action", "item_in_hand", "block_type", "block_location"),
    EventKind.ENTITY_INTERACT: ("player", "event", "entity_type"),
    EventKind.ENTITY_DAMAGE: ("player", "event", "entity_type", "damage"),
    EventKind.ITEM_CONSUME: ("player", "event", "item"),
    EventKind.ITEM_HELD: ("player", "event", "new_item"),
    EventKind.ITEM_DROP: ("player", "event", "item_type", "amount"),
    EventKind.ITEM_PICKUP: ("player", "event", "item_type", "amount"),
    EventKind.INVENTORY_CLICK: ("player", "event", "slot", "clicked_item"),
    EventKind.CRAFT: ("player", "event", "crafted_item", "amount"),
}

DAMAGE_DEALT = "EntityDamageDealtEvent"
DAMAGE_RECEIVED = "EntityDamageReceivedEvent"

EVENT_NAME_TO_KIND: dict[str, EventKind] = {
    "BlockBreakEvent": EventKind.BLOCK_BREAK,
    "BlockDamageEvent": EventKind.BLOCK_DAMAGE,
    "BlockPlaceEvent": EventKind.BLOCK_PLACE,
    "PlayerInteractEvent": EventKind.PLAYER_INTERACT,
    "EntityInteractEvent": EventKind.ENTITY_INTERACT,
    DAMAGE_DEALT: EventKind.ENTITY_DAMAGE,
    DAMAGE_RECEIVED: EventKind.ENTITY_DAMAGE,
    "ItemConsumeEvent": EventKind.ITEM_CONSUME,
    "ItemHeldEvent": EventKind.ITEM_HELD,
    "ItemDropEvent": EventKind.ITEM_DROP,
    "ItemPickupEvent": EventKind.ITEM_PICKUP,
    "InventoryClickEvent": EventKind.INVENTORY_CLICK,
    "CraftEvent": EventKind.CRAFT,
}


def default_event_name(kind: EventKind) -> str:
    if kind is EventKind.ENTITY_DAMAGE:
        raise ValueError("EntityDamage needs an explicit dealt/received name")
    return kind.value + "Event"


@dataclass(frozen=True, slots=True)
class GameEvent:
    game_tick: int
    actor: str
    kind: EventKind
    name: str
    payload: dict[str, Any]

    @classmethod
    def build(cls, game_tick: int, actor: str, kind: EventKind, name: str | None = None, **fields: Any) -> GameEvent:
        name = name or default_event_name(kind)
        if EVENT_NAME_TO_KIND.get(name) is not kind:
            raise ValueError(f"event name {name!r} does not belong to {kind.value}")
        keys = EVENT_FIELDS[kind]
        values = {"player": actor, "event": name, **fields}
        if set(values) != set(keys):
            raise ValueError(f"{name} payload must have exactly {keys}, got {sorted(values)}")
        return cls(game_tick, actor, kind, name, {k: values[k] for k in keys})
