from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

from voxlog.world.geometry import ZERO, Vec3, ViewAngles
from voxlog.world.grid import AIR, check_material

MAX_HEALTH = 20.0
MAX_HUNGER = 20.0
HOTBAR_SLOTS = 9
INVENTORY_SLOTS = 36
ARMOR_SLOTS = ("helmet", "chestplate", "leggings", "boots")


class ItemStack(NamedTuple):
    material: str
    amount: int

    def as_dict(self) -> dict[str, object]:
        return {"item": self.material, "amount": self.amount}


def clamp(x: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, x))


def stack_material(stack: ItemStack | None) -> str:
    return AIR if stack is None else stack.material


@dataclass(frozen=True, slots=True)
class Avatar:
    """One participant's body in the world.

    Records are immutable; the world swaps in a new record on every change,
    so an unchanged identity across ticks means unchanged state. Slots 0-8
    of ``inventory`` are the hotbar.
    """

    name: str
    position: Vec3
    view: ViewAngles = ViewAngles()
    velocity: Vec3 = ZERO
    health: float = MAX_HEALTH
    hunger: float = MAX_HUNGER
    inventory: tuple[ItemStack | None, ...] = (None,) * INVENTORY_SLOTS
    armor: tuple[ItemStack | None, ...] = (None,) * len(ARMOR_SLOTS)
    off_hand: ItemStack | None = None
    held_slot: int = 0
    waypoint: Vec3 | None = None
    speed: float = 0.0
    operator: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("avatar name must be non-empty")
        if len(self.inventory) != INVENTORY_SLOTS or len(self.armor) != len(ARMOR_SLOTS):
            raise ValueError("slot counts are fixed")
        if not 0 <= self.held_slot < HOTBAR_SLOTS:
            raise ValueError(f"held_slot {self.held_slot} outside [0, {HOTBAR_SLOTS - 1}]")
        object.__setattr__(self, "health", clamp(float(self.health), 0.0, MAX_HEALTH))
        object.__setattr__(self, "hunger", clamp(float(self.hunger), 0.0, MAX_HUNGER))
        for stack in (*self.inventory, *self.armor, self.off_hand):
            if stack is not None:
                check_material(stack.material)
                if stack.amount <= 0:
                    raise ValueError(f"item stack amount must be positive: {stack}")

    @property
    def hotbar(self) -> tuple[ItemStack | None, ...]:
        return self.inventory[:HOTBAR_SLOTS]

    @property
    def main_hand(self) -> ItemStack | None:
        return self.inventory[self.held_slot]

    def evolve(self, **changes: object) -> Avatar:
        return replace(self, **changes)

    def with_slot(self, slot: int, stack: ItemStack | None) -> Avatar:
        inventory = list(self.inventory)
        inventory[slot] = stack if stack is None or stack.amount > 0 else None
        return replace(self, inventory=tuple(inventory))
