"""Arm profile: the numeric description of the simulated robot's geometry.

A profile gives the two link lengths of the planar arm, the tip height at
the zero pose, per-joint angle limits, and the maximum joint speed used for
trajectory timing. Profiles are plain JSON files so a different arm can be
swapped in without code changes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path


class ProfileFormatError(ValueError):
    """Raised when an arm-profile document violates the schema."""


@dataclass(frozen=True)
class ArmProfile:
    """Geometry and limits of a 4-axis desk arm (yaw + shoulder + elbow + suction tip).

    Lengths are millimeters, angles degrees, speed degrees per second.
    ``joint_limits`` holds ``(min, max)`` per joint in order (yaw, shoulder, elbow).
    """

    l1: float
    l2: float
    base_height: float
    joint_limits: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    max_joint_speed: float

    def __post_init__(self) -> None:
        if not (self.l1 > 0 and math.isfinite(self.l1)):
            raise ProfileFormatError("l1 must be a positive finite length")
        if not (self.l2 > 0 and math.isfinite(self.l2)):
            raise ProfileFormatError("l2 must be a positive finite length")
        if not (self.base_height >= 0 and math.isfinite(self.base_height)):
            raise ProfileFormatError("base_height must be a non-negative finite length")
        if len(self.joint_limits) != 3:
            raise ProfileFormatError("joint_limits must list exactly three [min, max] pairs")
        for lo, hi in self.joint_limits:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ProfileFormatError("each joint limit must satisfy min < max")
        if not (self.max_joint_speed > 0 and math.isfinite(self.max_joint_speed)):
            raise ProfileFormatError("max_joint_speed must be positive and finite")

    def to_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "base_height": self.base_height,
            "joint_limits": [list(pair) for pair in self.joint_limits],
            "max_joint_speed": self.max_joint_speed,
        }


_FIELDS = {"l1", "l2", "base_height", "joint_limits", "max_joint_speed"}


def profile_from_dict(data: dict) -> ArmProfile:
    if not isinstance(data, dict):
        raise ProfileFormatError("profile document must be a JSON object")
    missing = _FIELDS - data.keys()
    if missing:
        raise ProfileFormatError(f"profile missing fields: {sorted(missing)}")
    extra = data.keys() - _FIELDS
    if extra:
        raise ProfileFormatError(f"profile has unknown fields: {sorted(extra)}")
    limits = data["joint_limits"]
    if not (isinstance(limits, list) and len(limits) == 3):
        raise ProfileFormatError("joint_limits must list exactly three [min, max] pairs")
    pairs = []
    for pair in limits:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ProfileFormatError("each joint limit must be a [min, max] pair")
        pairs.append((_number(pair[0], "joint limit"), _number(pair[1], "joint limit")))
    return ArmProfile(
        l1=_number(data["l1"], "l1"),
        l2=_number(data["l2"], "l2"),
        base_height=_number(data["base_height"], "base_height"),
        joint_limits=(pairs[0], pairs[1], pairs[2]),
        max_joint_speed=_number(data["max_joint_speed"], "max_joint_speed"),
    )


def load_arm_profile(path: str | Path) -> ArmProfile:
    """Read an arm-profile JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileFormatError(f"profile {path}: invalid JSON ({exc})") from exc
    return profile_from_dict(data)


def _number(value, label: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileFormatError(f"{label} must be a number")
    return float(value)


#: Desk-arm defaults approximating a small 4-axis suction-cup arm.
DEFAULT_PROFILE = ArmProfile(
    l1=135.0,
    l2=147.0,
    base_height=138.0,
    joint_limits=((-135.0, 135.0), (0.0, 85.0), (-10.0, 95.0)),
    max_joint_speed=90.0,
)
