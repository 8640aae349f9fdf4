"""Vectors, view angles and the view-to-direction convention."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")

    def __add__(self, other: Vec3) -> Vec3:
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> Vec3:
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: Vec3) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def block(self) -> tuple[int, int, int]:
        """Integer coordinates of the voxel containing this point."""
        return (math.floor(self.x), math.floor(self.y), math.floor(self.z))

    def as_dict(self) -> dict[str, float]:
        return {"x": float(self.x), "y": float(self.y), "z": float(self.z)}


ZERO = Vec3(0.0, 0.0, 0.0)


def normalize_yaw(yaw: float) -> float:
    """Wrap a yaw angle into [-180, 180)."""
    wrapped = math.fmod(yaw + 180.0, 360.0)
    if wrapped < 0:
        wrapped += 360.0
    return wrapped - 180.0


@dataclass(frozen=True, slots=True)
class ViewAngles:
    """Pitch in [-90, 90] (negative looks up), yaw in [-180, 180)."""

    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.pitch) or not -90.0 <= self.pitch <= 90.0:
            raise ValueError(f"pitch {self.pitch} outside [-90, 90]")
        if not math.isfinite(self.yaw):
            raise ValueError(f"non-finite yaw {self.yaw}")
        if not -180.0 <= self.yaw < 180.0:
            object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    def as_dict(self) -> dict[str, float]:
        return {"pitch": float(self.pitch), "yaw": float(self.yaw)}


def view_to_direction(view: ViewAngles) -> Vec3:
    pitch = math.radians(view.pitch)
    yaw = math.radians(view.yaw)
    cos_pitch = math.cos(pitch)
    return Vec3(-math.sin(yaw) * cos_pitch, -math.sin(pitch), math.cos(yaw) * cos_pitch)
