from __future__ import annotations

import pytest

import acceptance_registry
from voxlog.capture import CaptureConfig, FieldSelector, PollerSpec
from voxlog.world import Avatar, Vec3, ViewAngles, World

HF_FIELDS = (FieldSelector.LOCATION, FieldSelector.VIEW, FieldSelector.RAY_TRACE_BLOCK)


def make_world(*names: str, operator: str | None = None) -> World:
    world = World()
    for x in range(-4, 5):
        for z in range(-4, 5):
            world.set_block((x, 63, z), "GRASS_BLOCK")
    for i, name in enumerate(names):
        world.add_avatar(Avatar(name, Vec3(10.0 * i + 0.5, 64.0, 0.5), ViewAngles(30.0, 0.0), operator=name == operator))
    return world


def hf_config(*extra: PollerSpec, **kwargs) -> CaptureConfig:
    return CaptureConfig(pollers=(PollerSpec("HIGH_FREQUENCY_LOG_20Hz", 20, HF_FIELDS), *extra), **kwargs)


@pytest.fixture
def world():
    return make_world("Alice", "Bob", operator="Alice")


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_registry.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
