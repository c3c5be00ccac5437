"""Closed-form kinematics for a 4-axis desk arm.

The arm is a base yaw joint (theta1) carrying a planar two-link chain:
shoulder (theta2, measured from horizontal) and elbow (theta3, measured
relative to the rear arm). The suction tip keeps a fixed orientation, so
only the tip position is modeled.

Forward kinematics, with r = l1*cos(t2) + l2*cos(t2+t3):

    x = r * cos(t1)
    y = r * sin(t1)
    z = base_height + l1*sin(t2) + l2*sin(t2+t3)

The inverse is the standard planar two-link solution in the (r, z) plane.
Up to four configurations reach a point: the base can face the target or
face away with the chain folded over the top (negative planar radius), and
each facing has an elbow-up and an elbow-down solution. The solver prefers
facing the target with the elbow up and falls back through the remaining
branches in a fixed order, so ties break deterministically and a target is
rejected only when no branch respects the joint limits.

All public angles are degrees; radians are used internally only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .profiles import ArmProfile

#: Positions closer than this (mm) are considered equal.
POSITION_TOLERANCE_MM = 1e-6
#: Angles closer than this (degrees) are considered equal.
ANGLE_TOLERANCE_DEG = 1e-9
#: Slack for the in-limit check on IK candidates. acos conditioning near a
#: straight or fully folded elbow amplifies double-precision noise to a few
#: micro-degrees, so candidates that close to a limit are still accepted
#: (returned unclamped; their tip position is exact to well under 1e-6 mm).
IK_LIMIT_TOLERANCE_DEG = 1e-5


class Unreachable(ValueError):
    """Target cannot be attained within the arm's envelope or joint limits.

    ``reason`` is ``"out_of_envelope"`` when the point lies outside the
    geometric workspace and ``"joint_limit"`` when a solution exists but
    violates a joint range.
    """

    def __init__(self, reason: str, message: str) -> None:
        super().__init__(message)
        self.reason = reason


class InvalidWaypointCount(ValueError):
    """Trajectory planning needs at least two waypoints."""


@dataclass(frozen=True)
class JointState:
    """Joint angles in degrees: base yaw, shoulder from horizontal, elbow relative to rear arm."""

    theta1: float
    theta2: float
    theta3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


@dataclass(frozen=True)
class Pose:
    """Cartesian tip position in the robot base frame, millimeters."""

    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Trajectory:
    """Joint-space path: evenly interpolated waypoints plus unscaled duration in seconds."""

    waypoints: tuple[JointState, ...]
    duration: float


def forward_kinematics(profile: ArmProfile, q: JointState) -> Pose:
    """Map joint angles to the Cartesian tip position."""
    t1 = math.radians(q.theta1)
    t2 = math.radians(q.theta2)
    t23 = math.radians(q.theta2 + q.theta3)
    r = profile.l1 * math.cos(t2) + profile.l2 * math.cos(t23)
    z = profile.base_height + profile.l1 * math.sin(t2) + profile.l2 * math.sin(t23)
    return Pose(r * math.cos(t1), r * math.sin(t1), z)


def within_limits(profile: ArmProfile, q: JointState, tol: float = ANGLE_TOLERANCE_DEG) -> bool:
    """True when every joint angle lies inside its profile range (with tolerance)."""
    for angle, (lo, hi) in zip(q.as_tuple(), profile.joint_limits):
        if angle < lo - tol or angle > hi + tol:
            return False
    return True


def inverse_kinematics(profile: ArmProfile, target: Pose) -> JointState:
    """Solve joint angles for a Cartesian target.

    Raises :class:`Unreachable` when the target lies outside the envelope
    or when no arm configuration respects the joint limits.
    """
    for value in target.as_tuple():
        if not math.isfinite(value):
            raise Unreachable("out_of_envelope", "target coordinates must be finite")

    l1, l2 = profile.l1, profile.l2
    bearing = math.degrees(math.atan2(target.y, target.x))
    r = math.hypot(target.x, target.y)
    dz = target.z - profile.base_height

    cos_elbow = (r * r + dz * dz - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if abs(cos_elbow) > 1.0 + 1e-12:
        raise Unreachable(
            "out_of_envelope",
            f"target at distance {math.hypot(r, dz):.3f} mm from the shoulder is outside the envelope",
        )
    cos_elbow = max(-1.0, min(1.0, cos_elbow))
    elbow = math.degrees(math.acos(cos_elbow))
    folded = bearing - 180.0 if bearing > 0.0 else bearing + 180.0

    for theta1, radius in ((bearing, r), (folded, -r)):
        for theta3 in (elbow, -elbow):  # elbow-up first, elbow-down as fallback
            t3 = math.radians(theta3)
            theta2 = math.degrees(
                math.atan2(dz, radius) - math.atan2(l2 * math.sin(t3), l1 + l2 * math.cos(t3))
            )
            q = JointState(theta1, theta2, theta3)
            if within_limits(profile, q, tol=IK_LIMIT_TOLERANCE_DEG):
                return q
    raise Unreachable(
        "joint_limit",
        f"target {target.as_tuple()} has no arm configuration inside the joint limits",
    )


def is_reachable(profile: ArmProfile, target: Pose) -> bool:
    """True when :func:`inverse_kinematics` yields an in-limit solution."""
    try:
        inverse_kinematics(profile, target)
    except Unreachable:
        return False
    return True


def plan_trajectory(profile: ArmProfile, start: JointState, goal: JointState, n: int) -> Trajectory:
    """Linearly interpolate ``n`` waypoints per joint between two states.

    Duration is the largest per-joint angular distance divided by the
    profile's maximum joint speed; it is not scaled by any physics factor.
    """
    if n < 2:
        raise InvalidWaypointCount(f"waypoint count must be at least 2, got {n}")
    deltas = [g - s for s, g in zip(start.as_tuple(), goal.as_tuple())]
    duration = max(abs(d) for d in deltas) / profile.max_joint_speed
    waypoints = [start]
    for i in range(1, n - 1):
        f = i / (n - 1)
        waypoints.append(
            JointState(
                start.theta1 + deltas[0] * f,
                start.theta2 + deltas[1] * f,
                start.theta3 + deltas[2] * f,
            )
        )
    waypoints.append(goal)  # endpoints are exact, not interpolated
    return Trajectory(tuple(waypoints), duration)
