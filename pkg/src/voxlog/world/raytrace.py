"""Line-of-sight queries against the voxel grid and entity boxes.

Block tracing walks the grid one voxel at a time (Amanatides & Woo), so no
voxel the ray passes through is ever skipped, however thin the clipped
corner.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

from voxlog.world.geometry import Vec3, ViewAngles, view_to_direction
from voxlog.world.grid import AIR, BlockGrid, Coord, EntityRec

INF = math.inf


class BlockHit(NamedTuple):
    hit_location: Vec3
    block_type: str
    voxel: Coord
    distance: float


class EntityHit(NamedTuple):
    entity_id: int
    entity_type: str
    hit_distance: float


def _grid_entry_exit(grid: BlockGrid, o: tuple[float, float, float], d: tuple[float, float, float]) -> tuple[float, float]:
    # Slab test against the grid's bounding box, in ray-parameter units.
    assert grid.lo is not None and grid.hi is not None
    t0, t1 = 0.0, INF
    for axis in range(3):
        lo = grid.lo[axis]
        hi = grid.hi[axis] + 1
        if d[axis] == 0.0:
            if o[axis] < lo or o[axis] >= hi:
                return INF, -INF
            continue
        inv = 1.0 / d[axis]
        ta = (lo - o[axis]) * inv
        tb = (hi - o[axis]) * inv
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
    return t0, t1


def ray_trace_block(grid: BlockGrid, origin: Vec3, view: ViewAngles, max_distance: float) -> BlockHit | None:
    """First solid voxel along the view ray within ``max_distance``.

    The hit location is where the ray enters the voxel; a ray that starts
    inside a solid voxel reports that voxel at distance 0.
    """
    if not max_distance > 0:
        raise ValueError("max_distance must be > 0")
    if grid.lo is None or len(grid) == 0:
        return None
    d = view_to_direction(view)
    direction = (d.x, d.y, d.z)
    o = (origin.x, origin.y, origin.z)
    voxel = [math.floor(o[0]), math.floor(o[1]), math.floor(o[2])]

    material = grid.material_at(*voxel)
    if material != AIR:
        return BlockHit(origin, material, (voxel[0], voxel[1], voxel[2]), 0.0)

    t_enter, t_exit = _grid_entry_exit(grid, o, direction)
    if t_enter > t_exit or t_enter > max_distance:
        return None
    limit = min(max_distance, t_exit)

    step = [0, 0, 0]
    t_max = [INF, INF, INF]
    t_delta = [INF, INF, INF]
    for axis in range(3):
        if direction[axis] > 0.0:
            step[axis] = 1
            t_max[axis] = (voxel[axis] + 1 - o[axis]) / direction[axis]
            t_delta[axis] = 1.0 / direction[axis]
        elif direction[axis] < 0.0:
            step[axis] = -1
            t_max[axis] = (voxel[axis] - o[axis]) / direction[axis]
            t_delta[axis] = -1.0 / direction[axis]

    blocks_get = grid._blocks.get
    while True:
        if t_max[0] < t_max[1]:
            axis = 0 if t_max[0] < t_max[2] else 2
        else:
            axis = 1 if t_max[1] < t_max[2] else 2
        t = t_max[axis]
        if t > limit:
            return None
        voxel[axis] += step[axis]
        t_max[axis] += t_delta[axis]
        material = blocks_get((voxel[0], voxel[1], voxel[2]))
        if material is not None:
            point = [o[0] + direction[0] * t, o[1] + direction[1] * t, o[2] + direction[2] * t]
            # the crossed face lies exactly on an integer plane
            point[axis] = float(voxel[axis] if step[axis] > 0 else voxel[axis] + 1)
            return BlockHit(Vec3(*point), material, (voxel[0], voxel[1], voxel[2]), t)


def ray_box_entry(origin: Vec3, direction: Vec3, lo: Vec3, hi: Vec3) -> float | None:
    """Ray parameter where the ray enters the box (0 if it starts inside), else None."""
    t0, t1 = 0.0, INF
    for o, d, a, b in (
        (origin.x, direction.x, lo.x, hi.x),
        (origin.y, direction.y, lo.y, hi.y),
        (origin.z, direction.z, lo.z, hi.z),
    ):
        if d == 0.0:
            if o < a or o > b:
                return None
            continue
        ta = (a - o) / d
        tb = (b - o) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return None
    return t0


def ray_trace_entities(
    entities: Iterable[EntityRec], origin: Vec3, view: ViewAngles, max_distance: float
) -> list[EntityHit]:
    """Entities whose unit-cube box (centred on the entity) the ray meets, nearest first."""
    if not max_distance > 0:
        raise ValueError("max_distance must be > 0")
    direction = view_to_direction(view)
    hits = []
    for entity in entities:
        p = entity.position
        t = ray_box_entry(origin, direction, Vec3(p.x - 0.5, p.y - 0.5, p.z - 0.5), Vec3(p.x + 0.5, p.y + 0.5, p.z + 0.5))
        if t is not None and t <= max_distance:
            hits.append(EntityHit(entity.entity_id, entity.entity_type, t))
    hits.sort(key=lambda h: (h.hit_distance, h.entity_id))
    return hits
