"""Simulated voxel world: the data source for capture."""

from voxlog.world.avatar import Avatar, ItemStack
from voxlog.world.events import EVENT_FIELDS, EventKind, GameEvent
from voxlog.world.geometry import Vec3, ViewAngles, view_to_direction
from voxlog.world.grid import AIR, DEFAULT_BIOME, BlockGrid, EntityRec
from voxlog.world.raytrace import BlockHit, EntityHit, ray_trace_block, ray_trace_entities
from voxlog.world.scenario import Directive, Scenario, load_scenario, parse_scenario
from voxlog.world.script import Action, ScenarioError, ScenarioScript
from voxlog.world.sim import TICK_MS, TICK_RATE, World, WorldClock, WorldSnapshot

__all__ = [
    "AIR",
    "DEFAULT_BIOME",
    "EVENT_FIELDS",
    "TICK_MS",
    "TICK_RATE",
    "Action",
    "Avatar",
    "BlockGrid",
    "BlockHit",
    "Directive",
    "EntityHit",
    "EntityRec",
    "EventKind",
    "GameEvent",
    "ItemStack",
    "Scenario",
    "ScenarioError",
    "ScenarioScript",
    "Vec3",
    "ViewAngles",
    "World",
    "WorldClock",
    "WorldSnapshot",
    "load_scenario",
    "parse_scenario",
    "ray_trace_block",
    "ray_trace_entities",
    "view_to_direction",
]
