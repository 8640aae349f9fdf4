"""Sparse voxel storage, per-column biomes and entity records."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator

from voxlog.world.geometry import Vec3

AIR = "AIR"
DEFAULT_BIOME = "PLAINS"

_MATERIAL_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")

Coord = tuple[int, int, int]


def check_material(material: str) -> str:
    if not isinstance(material, str) or not _MATERIAL_RE.match(material):
        raise ValueError(f"material identifier must be a non-empty uppercase string, got {material!r}")
    return material


class BlockGrid:
    """Sparse map of solid voxels; anything not stored is air.

    ``version`` increments on every mutation so readers can tell whether a
    cached copy is still current. Bounds only ever grow, which keeps them a
    valid (if loose) enclosure of every solid voxel.
    """

    def __init__(self) -> None:
        self._blocks: dict[Coord, str] = {}
        self._biomes: dict[tuple[int, int], str] = {}
        self.version = 0
        self.lo: list[int] | None = None
        self.hi: list[int] | None = None
        self._frozen = False

    def __len__(self) -> int:
        return len(self._blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockGrid):
            return NotImplemented
        return self._blocks == other._blocks and self._biomes == other._biomes

    def material_at(self, x: int, y: int, z: int) -> str:
        return self._blocks.get((x, y, z), AIR)

    def set_block(self, coord: Coord, material: str) -> None:
        if self._frozen:
            raise TypeError("grid snapshot is read-only")
        coord = (int(coord[0]), int(coord[1]), int(coord[2]))
        if material == AIR:
            self._blocks.pop(coord, None)
        else:
            self._blocks[coord] = check_material(material)
            if self.lo is None or self.hi is None:
                self.lo, self.hi = list(coord), list(coord)
            else:
                for axis in range(3):
                    if coord[axis] < self.lo[axis]:
                        self.lo[axis] = coord[axis]
                    if coord[axis] > self.hi[axis]:
                        self.hi[axis] = coord[axis]
        self.version += 1

    def set_biome(self, x: int, z: int, biome: str) -> None:
        if self._frozen:
            raise TypeError("grid snapshot is read-only")
        self._biomes[(int(x), int(z))] = check_material(biome)
        self.version += 1

    def biome_at(self, position: Vec3) -> str:
        return self._biomes.get((math.floor(position.x), math.floor(position.z)), DEFAULT_BIOME)

    def solid_blocks(self) -> Iterator[tuple[Coord, str]]:
        return iter(self._blocks.items())

    def biomes(self) -> Iterator[tuple[tuple[int, int], str]]:
        return iter(self._biomes.items())

    def frozen_copy(self) -> BlockGrid:
        copy = BlockGrid()
        copy._blocks = dict(self._blocks)
        copy._biomes = dict(self._biomes)
        copy.version = self.version
        copy.lo = None if self.lo is None else list(self.lo)
        copy.hi = None if self.hi is None else list(self.hi)
        copy._frozen = True
        return copy

    def nearby_blocks(self, center: Vec3, radius: int) -> list[tuple[Coord, str]]:
        """Solid voxels within Chebyshev distance ``radius`` of the voxel holding ``center``."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        cx, cy, cz = center.block()
        side = 2 * radius + 1
        found: list[tuple[Coord, str]]
        if side * side * side <= len(self._blocks):
            found = []
            get = self._blocks.get
            for x in range(cx - radius, cx + radius + 1):
                for y in range(cy - radius, cy + radius + 1):
                    for z in range(cz - radius, cz + radius + 1):
                        material = get((x, y, z))
                        if material is not None:
                            found.append(((x, y, z), material))
            return found
        found = [
            (coord, material)
            for coord, material in self._blocks.items()
            if abs(coord[0] - cx) <= radius and abs(coord[1] - cy) <= radius and abs(coord[2] - cz) <= radius
        ]
        found.sort()
        return found


@dataclass(frozen=True, slots=True)
class EntityRec:
    entity_id: int
    entity_type: str
    position: Vec3
    health: float = 10.0
    max_health: float = 10.0

    def __post_init__(self) -> None:
        check_material(self.entity_type)
        if not 0.0 <= self.health <= self.max_health:
            raise ValueError(f"entity {self.entity_id} health {self.health} outside [0, {self.max_health}]")


def nearby_entities(entities: dict[int, EntityRec], center: Vec3, radius: float) -> list[EntityRec]:
    """Entities inside the closed Euclidean ball, ordered by id."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    r2 = radius * radius
    hits = []
    for entity in entities.values():
        dx = entity.position.x - center.x
        dy = entity.position.y - center.y
        dz = entity.position.z - center.z
        if dx * dx + dy * dy + dz * dz <= r2:
            hits.append(entity)
    hits.sort(key=lambda e: e.entity_id)
    return hits
