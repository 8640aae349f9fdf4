"""Line-oriented scenario files: world fixture plus per-agent schedules.

One statement per line, ``#`` starts a comment::

    agent Alice 0.5 64 0.5 [pitch yaw] [op]
    block 3 64 0 STONE
    fill 0 63 0 9 63 9 GRASS_BLOCK
    biome 0 0 DESERT
    entity 1 COW 5 64.5 0.5 [health]
    give Alice 0 BREAD 3
    equip Alice helmet IRON_HELMET
    at 10 Alice break 3 64 0
    at 0 Alice pl-start
    at 100 Admin pl-stop-op Alice
    at 120 console pl-start-op Alice
    at 150 Bob disconnect

``at`` lines carry either a world action (see ``ACTION_SIGNATURES``) or a
control directive (``COMMANDS``). Actions run during the advance into their
tick, so they need tick >= 1; directives may use tick 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from voxlog.assembler.timefmt import parse_utc
from voxlog.world.avatar import ARMOR_SLOTS, Avatar, ItemStack
from voxlog.world.geometry import Vec3, ViewAngles
from voxlog.world.grid import EntityRec, check_material
from voxlog.world.script import Action, ScenarioError, ScenarioScript
from voxlog.world.sim import DEFAULT_EPOCH, World

COMMANDS = ("pl-start", "pl-stop", "pl-start-op", "pl-stop-op", "pl-version", "disconnect")
CONSOLE = "console"  # issuer for directives not tied to a player; holds operator rights
_TARGETED = ("pl-start-op", "pl-stop-op")
MAX_FILL = 100_000


@dataclass(frozen=True)
class Directive:
    tick: int
    issuer: str
    command: str
    target: str | None = None
    line: int | None = None


@dataclass
class Scenario:
    avatars: list[Avatar] = field(default_factory=list)
    blocks: list[tuple[tuple[int, int, int], str]] = field(default_factory=list)
    biomes: list[tuple[int, int, str]] = field(default_factory=list)
    entities: list[EntityRec] = field(default_factory=list)
    script: ScenarioScript = field(default_factory=ScenarioScript)
    directives: list[Directive] = field(default_factory=list)
    epoch: datetime | None = None

    @property
    def participants(self) -> list[str]:
        return [a.name for a in self.avatars]

    def build_world(self, epoch: datetime | None = None) -> World:
        world = World(epoch or self.epoch or DEFAULT_EPOCH)
        for coord, material in self.blocks:
            world.set_block(coord, material)
        for x, z, biome in self.biomes:
            world.set_biome(x, z, biome)
        for entity in self.entities:
            world.add_entity(entity)
        for avatar in self.avatars:
            world.add_avatar(avatar)
        return world

    def last_tick(self) -> int:
        return max([self.script.last_tick(), *(d.tick for d in self.directives)], default=0)


def _name(token: str) -> str:
    if not token or any(c in token for c in '/\\<>:"|?*') or not token.isprintable():
        raise ValueError(f"invalid participant name {token!r}")
    return token


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text; errors carry the 1-based line number."""
    scenario = Scenario()
    avatars: dict[str, Avatar] = {}
    order: list[str] = []
    first_use: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "epoch":
                (stamp,) = rest
                scenario.epoch = parse_utc(stamp)
            elif head == "agent":
                if len(rest) < 4:
                    raise ValueError("agent NAME X Y Z [PITCH YAW] [op]")
                operator = rest[-1] == "op"
                if operator:
                    rest = rest[:-1]
                if len(rest) not in (4, 6):
                    raise ValueError("agent NAME X Y Z [PITCH YAW] [op]")
                name = _name(rest[0])
                if name in avatars:
                    raise ValueError(f"agent {name!r} declared twice")
                view = ViewAngles(float(rest[4]), float(rest[5])) if len(rest) == 6 else ViewAngles()
                avatars[name] = Avatar(name, Vec3(*map(float, rest[1:4])), view, operator=operator)
                order.append(name)
            elif head == "block":
                x, y, z, material = rest
                scenario.blocks.append(((int(x), int(y), int(z)), check_material(material)))
            elif head == "fill":
                *nums, material = rest
                if len(nums) != 6:
                    raise ValueError("fill X1 Y1 Z1 X2 Y2 Z2 MATERIAL")
                x1, y1, z1, x2, y2, z2 = map(int, nums)
                check_material(material)
                xs = range(min(x1, x2), max(x1, x2) + 1)
                ys = range(min(y1, y2), max(y1, y2) + 1)
                zs = range(min(z1, z2), max(z1, z2) + 1)
                if len(xs) * len(ys) * len(zs) > MAX_FILL:
                    raise ValueError(f"fill volume exceeds {MAX_FILL} voxels")
                scenario.blocks.extend(((x, y, z), material) for x in xs for y in ys for z in zs)
            elif head == "biome":
                x, z, biome = rest
                scenario.biomes.append((int(x), int(z), check_material(biome)))
            elif head == "entity":
                if len(rest) not in (5, 6):
                    raise ValueError("entity ID TYPE X Y Z [HEALTH]")
                health = float(rest[5]) if len(rest) == 6 else 10.0
                scenario.entities.append(
                    EntityRec(int(rest[0]), rest[1], Vec3(*map(float, rest[2:5])), health, max(health, 10.0))
                )
            elif head == "give":
                name, slot, material, amount = rest
                avatar = _known(avatars, name)
                avatars[name] = avatar.with_slot(int(slot), ItemStack(check_material(material), int(amount)))
            elif head == "equip":
                name, slot_name, material = rest
                avatar = _known(avatars, name)
                stack = ItemStack(check_material(material), 1)
                if slot_name == "off_hand":
                    avatars[name] = avatar.evolve(off_hand=stack)
                elif slot_name in ARMOR_SLOTS:
                    armor = list(avatar.armor)
                    armor[ARMOR_SLOTS.index(slot_name)] = stack
                    avatars[name] = avatar.evolve(armor=tuple(armor))
                else:
                    raise ValueError(f"unknown equipment slot {slot_name!r}")
            elif head == "at":
                if len(rest) < 3:
                    raise ValueError("at TICK AGENT VERB [ARGS...]")
                tick = int(rest[0])
                if tick < 0:
                    raise ValueError("tick must be >= 0")
                agent, verb, args = rest[1], rest[2], rest[3:]
                first_use.setdefault(agent, lineno)
                if verb in COMMANDS:
                    if verb in _TARGETED:
                        if len(args) != 1:
                            raise ValueError(f"{verb} takes exactly one username")
                        target = args[0]
                    elif args:
                        raise ValueError(f"{verb} takes no arguments")
                    else:
                        target = None
                    scenario.directives.append(Directive(tick, agent, verb, target, lineno))
                else:
                    if agent == CONSOLE:
                        raise ValueError("the console issues commands, not world actions")
                    if tick < 1:
                        raise ValueError("world actions need tick >= 1")
                    scenario.script.add(agent, tick, Action.parse(verb, args))
            else:
                raise ValueError(f"unknown statement {head!r}")
        except ScenarioError as exc:
            raise ScenarioError(str(exc), line=lineno) from None
        except (ValueError, TypeError) as exc:
            raise ScenarioError(str(exc) or "malformed statement", line=lineno) from None

    for name, lineno in first_use.items():
        if name not in avatars and name != CONSOLE:
            raise ScenarioError(f"agent {name!r} is never declared", line=lineno)
    scenario.avatars = [avatars[n] for n in order]
    return scenario


def _known(avatars: dict[str, Avatar], name: str) -> Avatar:
    if name not in avatars:
        raise ValueError(f"agent {name!r} must be declared before use")
    return avatars[name]


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
