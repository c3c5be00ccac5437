"""Simulated workspace: robot base placement plus axis-aligned box objects.

Scene files are JSON:

    {"robot_base": {"translation": [x, y, z], "yaw": deg},
     "objects": [{"id": str, "center": [x, y, z], "size": [sx, sy, sz], "color": str}]}

All scene coordinates are world frame, millimeters. The robot base
placement defines the rigid transform between the world frame and the
robot base frame (translation plus yaw about the world z axis).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Aabb
from .kinematics import Pose


class SceneFormatError(ValueError):
    """Scene document violates the schema. ``path`` points at the offending node."""

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class DuplicateObjectId(SceneFormatError):
    def __init__(self, object_id: str) -> None:
        super().__init__("objects", f"duplicate object id {object_id!r}")
        self.object_id = object_id


@dataclass
class SceneObject:
    id: str
    center: Pose
    size: tuple[float, float, float]
    color: str
    attached: bool = False

    def aabb(self) -> Aabb:
        return Aabb(self.center.as_tuple(), self.size)

    def top_center(self) -> Pose:
        return Pose(self.center.x, self.center.y, self.center.z + self.size[2] / 2.0)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "center": list(self.center.as_tuple()),
            "size": list(self.size),
            "color": self.color,
            "attached": self.attached,
        }


@dataclass(frozen=True)
class RobotBase:
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw: float = 0.0

    def to_dict(self) -> dict:
        return {"translation": list(self.translation), "yaw": self.yaw}


@dataclass
class Scene:
    robot_base: RobotBase = RobotBase()
    objects: list[SceneObject] = field(default_factory=list)

    def object_by_id(self, object_id: str) -> SceneObject | None:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        return None

    def copy(self) -> "Scene":
        return Scene(
            robot_base=self.robot_base,
            objects=[
                SceneObject(o.id, o.center, o.size, o.color, o.attached) for o in self.objects
            ],
        )


EMPTY_SCENE = Scene()


def scene_from_dict(data: object) -> Scene:
    if not isinstance(data, dict):
        raise SceneFormatError("$", "scene document must be a JSON object")
    extra = data.keys() - {"robot_base", "objects"}
    if extra:
        raise SceneFormatError("$", f"unknown fields: {sorted(extra)}")
    if "robot_base" not in data:
        raise SceneFormatError("robot_base", "missing")
    if "objects" not in data:
        raise SceneFormatError("objects", "missing")

    base = data["robot_base"]
    if not isinstance(base, dict) or set(base.keys()) != {"translation", "yaw"}:
        raise SceneFormatError("robot_base", "must have exactly 'translation' and 'yaw'")
    translation = _vector(base["translation"], "robot_base.translation")
    yaw = _number(base["yaw"], "robot_base.yaw")

    if not isinstance(data["objects"], list):
        raise SceneFormatError("objects", "must be an array")
    objects: list[SceneObject] = []
    seen: set[str] = set()
    for i, entry in enumerate(data["objects"]):
        path = f"objects[{i}]"
        if not isinstance(entry, dict) or set(entry.keys()) != {"id", "center", "size", "color"}:
            raise SceneFormatError(path, "must have exactly id, center, size, color")
        object_id = entry["id"]
        if not isinstance(object_id, str) or not object_id:
            raise SceneFormatError(f"{path}.id", "must be a non-empty string")
        if object_id in seen:
            raise DuplicateObjectId(object_id)
        seen.add(object_id)
        size = _vector(entry["size"], f"{path}.size")
        if any(s <= 0 for s in size):
            raise SceneFormatError(f"{path}.size", "components must be positive")
        if not isinstance(entry["color"], str):
            raise SceneFormatError(f"{path}.color", "must be a string")
        center = _vector(entry["center"], f"{path}.center")
        objects.append(SceneObject(object_id, Pose(*center), size, entry["color"]))
    return Scene(RobotBase(translation, yaw), objects)


def load_scene(text: str) -> Scene:
    """Parse a scene JSON document; all objects start unattached."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError("$", f"invalid JSON ({exc})") from exc
    return scene_from_dict(data)


def load_scene_file(path: str | Path) -> Scene:
    return load_scene(Path(path).read_text(encoding="utf-8"))


def world_to_robot(scene: Scene, point: Pose) -> Pose:
    """World frame to robot base frame: subtract translation, rotate by -yaw."""
    base = scene.robot_base
    dx = point.x - base.translation[0]
    dy = point.y - base.translation[1]
    dz = point.z - base.translation[2]
    c = math.cos(math.radians(base.yaw))
    s = math.sin(math.radians(base.yaw))
    return Pose(c * dx + s * dy, -s * dx + c * dy, dz)


def robot_to_world(scene: Scene, point: Pose) -> Pose:
    """Robot base frame to world frame: rotate by yaw, add translation."""
    base = scene.robot_base
    c = math.cos(math.radians(base.yaw))
    s = math.sin(math.radians(base.yaw))
    x = c * point.x - s * point.y
    y = s * point.x + c * point.y
    return Pose(
        x + base.translation[0],
        y + base.translation[1],
        point.z + base.translation[2],
    )


def _vector(value: object, path: str) -> tuple[float, float, float]:
    if not (isinstance(value, list) and len(value) == 3):
        raise SceneFormatError(path, "must be an [x, y, z] array")
    return tuple(_number(v, path) for v in value)  # type: ignore[return-value]


def _number(value: object, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneFormatError(path, "must be a number")
    result = float(value)
    if not math.isfinite(result):
        raise SceneFormatError(path, "must be finite")
    return result
