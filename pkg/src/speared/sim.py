"""Discrete-time kinematic simulation of program execution.

The simulator owns a scene copy and an arm profile and advances a clock in
simulated seconds. Moves are executed as joint-space trajectories followed
at a constant parametric rate; a speed factor > 1 shortens the wall time a
trajectory needs without changing its geometry. Suction commands are
instantaneous: enabling picks the nearest object whose top-face center is
within reach of the tip, disabling drops the held object onto the floor.

Two timing rules keep runs reproducible:

* Command boundaries are chained analytically (each motion's end time is
  its start time plus scaled duration), so the stamps of discrete events
  do not depend on how callers partition ``step`` calls.
* While paused, ``step`` changes nothing at all.

Collision checks run on the swept tip point every substep (at most 5 ms of
simulated time) against every unattached scene box; a hit freezes the arm
at the last collision-free pose, pauses physics, and aborts execution with
the offending command index preserved for root-cause inspection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .dsl import Diagnostic, Move, Program, Suction, validate_program
from .geometry import segment_aabb_contact
from .kinematics import (
    JointState,
    Pose,
    Trajectory,
    forward_kinematics,
    inverse_kinematics,
    plan_trajectory,
)
from .profiles import ArmProfile
from .scene import Scene, SceneObject, robot_to_world

#: Maximum simulated seconds between collision checks.
COLLISION_SUBSTEP_S = 0.005
#: Waypoints per second of unscaled trajectory duration (visualization density).
WAYPOINTS_PER_SECOND = 50
#: Pick range: tip to object top-face center, millimeters.
PICK_TOLERANCE_MM = 10.0


class NotIdleError(RuntimeError):
    """A program or manual move is already executing."""


class ValidationFailedError(ValueError):
    """Submitted program has error diagnostics; carries them."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__("program failed validation")
        self.diagnostics = diagnostics


class InvalidFactor(ValueError):
    """Speed factor must be finite and positive."""


@dataclass(frozen=True)
class SimState:
    """Observable simulator state snapshot."""

    joints: JointState
    suction: bool
    held_object: Optional[str]
    paused: bool
    speed_factor: float
    clock: float
    idle: bool
    current_command: Optional[int]


@dataclass(frozen=True)
class JointStateChanged:
    joints: JointState
    stamp: float


@dataclass(frozen=True)
class CommandStarted:
    index: int
    stamp: float


@dataclass(frozen=True)
class CommandFinished:
    index: int
    stamp: float


@dataclass(frozen=True)
class TrajectoryPlanned:
    command_index: Optional[int]
    trajectory: Trajectory
    stamp: float


@dataclass(frozen=True)
class Collision:
    object_id: str
    command_index: Optional[int]
    tip_pose: Pose
    stamp: float


@dataclass(frozen=True)
class ObjectPicked:
    object_id: str
    stamp: float


@dataclass(frozen=True)
class ObjectReleased:
    object_id: str
    rest_pose: Pose
    stamp: float


@dataclass(frozen=True)
class ProgramFinished:
    status: str  # "success" | "collision"
    stamp: float


SimEvent = Union[
    JointStateChanged,
    CommandStarted,
    CommandFinished,
    TrajectoryPlanned,
    Collision,
    ObjectPicked,
    ObjectReleased,
    ProgramFinished,
]


def event_to_payload(event: SimEvent) -> dict:
    """Uniform JSON shape for events, shared by topics and execution reports."""
    if isinstance(event, JointStateChanged):
        q = event.joints
        return {
            "event": "joint_state",
            "theta1": q.theta1,
            "theta2": q.theta2,
            "theta3": q.theta3,
            "stamp": event.stamp,
        }
    if isinstance(event, CommandStarted):
        return {"event": "command_started", "index": event.index, "stamp": event.stamp}
    if isinstance(event, CommandFinished):
        return {"event": "command_finished", "index": event.index, "stamp": event.stamp}
    if isinstance(event, TrajectoryPlanned):
        return {
            "event": "trajectory_planned",
            "command_index": event.command_index,
            "duration": event.trajectory.duration,
            "waypoints": [list(q.as_tuple()) for q in event.trajectory.waypoints],
            "stamp": event.stamp,
        }
    if isinstance(event, Collision):
        return {
            "event": "collision",
            "object_id": event.object_id,
            "command_index": event.command_index,
            "tip": list(event.tip_pose.as_tuple()),
            "stamp": event.stamp,
        }
    if isinstance(event, ObjectPicked):
        return {"event": "object_picked", "id": event.object_id, "stamp": event.stamp}
    if isinstance(event, ObjectReleased):
        return {
            "event": "object_released",
            "id": event.object_id,
            "rest": list(event.rest_pose.as_tuple()),
            "stamp": event.stamp,
        }
    if isinstance(event, ProgramFinished):
        return {"event": "program_finished", "status": event.status, "stamp": event.stamp}
    raise TypeError(f"unknown event {event!r}")


@dataclass
class _Motion:
    start: JointState
    goal: JointState
    duration: float  # unscaled seconds, > 0
    s0: float  # completed fraction at the anchor
    clock0: float  # anchor clock
    command_index: Optional[int]  # None for manual moves


def _lerp(start: JointState, goal: JointState, s: float) -> JointState:
    if s >= 1.0:
        return goal
    return JointState(
        start.theta1 + (goal.theta1 - start.theta1) * s,
        start.theta2 + (goal.theta2 - start.theta2) * s,
        start.theta3 + (goal.theta3 - start.theta3) * s,
    )


class Simulator:
    """Drives one arm through programs and manual moves over a scene copy.

    Not thread-safe: a single owner must serialize all calls. Snapshots
    returned by :meth:`state` and :meth:`detect_objects` are plain values
    and may be shared freely.
    """

    def __init__(self, profile: ArmProfile, scene: Scene) -> None:
        self.profile = profile
        self.scene = scene.copy()
        self._joints = JointState(0.0, 0.0, 0.0)
        self._suction = False
        self._held: Optional[str] = None
        self._held_offset = (0.0, 0.0, 0.0)
        self._paused = False
        self._speed_factor = 1.0
        self._clock = 0.0
        self._current_command: Optional[int] = None
        self._motion: Optional[_Motion] = None
        self._program: Optional[Program] = None
        self._next_index = 0
        self._command_started = False

    # ------------------------------------------------------------------ state

    @property
    def idle(self) -> bool:
        return self._motion is None and self._program is None

    @property
    def clock(self) -> float:
        return self._clock

    @property
    def joints(self) -> JointState:
        return self._joints

    def state(self) -> SimState:
        return SimState(
            joints=self._joints,
            suction=self._suction,
            held_object=self._held,
            paused=self._paused,
            speed_factor=self._speed_factor,
            clock=self._clock,
            idle=self.idle,
            current_command=self._current_command,
        )

    def state_payload(self) -> dict:
        q = self._joints
        return {
            "joints": {"theta1": q.theta1, "theta2": q.theta2, "theta3": q.theta3},
            "suction": self._suction,
            "held_object": self._held,
            "physics": {"paused": self._paused, "speed_factor": self._speed_factor},
            "clock": self._clock,
            "idle": self.idle,
            "current_command": self._current_command,
        }

    def tip_pose(self) -> Pose:
        """Tip position in the robot base frame."""
        return forward_kinematics(self.profile, self._joints)

    def tip_world(self) -> Pose:
        return robot_to_world(self.scene, self.tip_pose())

    def detect_objects(self) -> list[dict]:
        """Snapshot of every scene object's current pose, size, color, attachment."""
        return [obj.to_dict() for obj in self.scene.objects]

    # ------------------------------------------------------------- mutations

    def submit_program(self, program: Program) -> list[SimEvent]:
        """Begin executing a program at command 0.

        Raises :class:`NotIdleError` while something else runs and
        :class:`ValidationFailedError` when validation yields errors.
        """
        if not self.idle:
            raise NotIdleError("a program or manual move is already executing")
        diagnostics = validate_program(program, self.profile)
        if any(d.severity == "error" for d in diagnostics):
            raise ValidationFailedError(diagnostics)
        self._program = program
        self._next_index = 0
        self._command_started = False
        events: list[SimEvent] = []
        self._advance_program(events)
        return events

    def move_to(self, target: Pose) -> list[SimEvent]:
        """Start a manual move to a robot-frame point (no program bookkeeping).

        Raises :class:`NotIdleError` or :class:`kinematics.Unreachable`.
        """
        if not self.idle:
            raise NotIdleError("a program or manual move is already executing")
        goal = inverse_kinematics(self.profile, target)
        trajectory, motion = self._plan_motion(goal, command_index=None)
        events: list[SimEvent] = [TrajectoryPlanned(None, trajectory, stamp=self._clock)]
        if motion is not None:
            self._motion = motion
        return events

    def set_suction(self, enabled: bool) -> list[SimEvent]:
        """Toggle the suction cup; picking happens only on the off-to-on edge."""
        events: list[SimEvent] = []
        was = self._suction
        self._suction = enabled
        if enabled and not was:
            picked = self._nearest_pickable()
            if picked is not None:
                tip = self.tip_world()
                picked.attached = True
                self._held = picked.id
                self._held_offset = (
                    picked.center.x - tip.x,
                    picked.center.y - tip.y,
                    picked.center.z - tip.z,
                )
                events.append(ObjectPicked(picked.id, stamp=self._clock))
        elif not enabled and was and self._held is not None:
            obj = self.scene.object_by_id(self._held)
            assert obj is not None
            rest = Pose(obj.center.x, obj.center.y, obj.size[2] / 2.0)
            obj.center = rest
            obj.attached = False
            events.append(ObjectReleased(obj.id, rest, stamp=self._clock))
            self._held = None
        return events

    def set_physics(self, action: str, factor: Optional[float] = None) -> None:
        """Pause, resume, or change the speed factor."""
        if action == "pause":
            self._paused = True
        elif action == "resume":
            self._paused = False
        elif action == "set_speed":
            if (
                factor is None
                or isinstance(factor, bool)
                or not isinstance(factor, (int, float))
                or not math.isfinite(factor)
                or factor <= 0
            ):
                raise InvalidFactor(f"speed factor must be a positive finite number, got {factor!r}")
            if self._motion is not None:
                m = self._motion
                m.s0 = self._fraction_at(m, self._clock)
                m.clock0 = self._clock
            self._speed_factor = float(factor)
        else:
            raise ValueError(f"unknown physics action {action!r}")

    def step(self, dt: float) -> list[SimEvent]:
        """Advance simulated time by ``dt`` seconds (no-op while paused)."""
        if dt < 0 or not math.isfinite(dt):
            raise ValueError("dt must be a finite non-negative number")
        if self._paused or dt == 0.0:
            return []
        events: list[SimEvent] = []
        joints_before = self._joints
        remaining = dt
        while True:
            if self._motion is None:
                self._advance_program(events)
                if self._motion is None:
                    self._clock += remaining
                    break
            motion = self._motion
            end_clock = self._motion_end(motion)
            span = end_clock - self._clock
            completing = remaining >= span
            consume = span if completing else remaining
            if self._sweep(motion, consume, end_clock if completing else None, events):
                break  # collision froze the simulation
            if not completing:
                break
            index = motion.command_index
            self._motion = None
            if index is not None:
                events.append(CommandFinished(index, stamp=self._clock))
                self._command_started = False
                self._next_index = index + 1
            remaining -= span
            self._advance_program(events)
            if remaining <= 0.0:
                break
        if self._joints != joints_before:
            events.append(JointStateChanged(self._joints, stamp=self._clock))
        return events

    # -------------------------------------------------------------- internals

    def _plan_motion(
        self, goal: JointState, command_index: Optional[int]
    ) -> tuple[Trajectory, Optional[_Motion]]:
        deltas = [
            abs(g - s) for s, g in zip(self._joints.as_tuple(), goal.as_tuple())
        ]
        duration = max(deltas) / self.profile.max_joint_speed
        n = max(2, math.ceil(duration * WAYPOINTS_PER_SECOND))
        trajectory = plan_trajectory(self.profile, self._joints, goal, n)
        if trajectory.duration <= 0.0:
            return trajectory, None
        motion = _Motion(
            start=self._joints,
            goal=goal,
            duration=trajectory.duration,
            s0=0.0,
            clock0=self._clock,
            command_index=command_index,
        )
        return trajectory, motion

    def _motion_end(self, motion: _Motion) -> float:
        return motion.clock0 + motion.duration * (1.0 - motion.s0) / self._speed_factor

    def _fraction_at(self, motion: _Motion, clock: float) -> float:
        s = motion.s0 + (clock - motion.clock0) * self._speed_factor / motion.duration
        return min(1.0, max(0.0, s))

    def _advance_program(self, events: list[SimEvent]) -> None:
        """Start/execute commands until a motion pends, pause blocks, or the program ends."""
        while self._program is not None:
            program = self._program
            if self._next_index >= len(program.commands):
                events.append(ProgramFinished("success", stamp=self._clock))
                self._program = None
                self._current_command = None
                return
            index = self._next_index
            command = program.commands[index]
            if not self._command_started:
                self._command_started = True
                self._current_command = index
                events.append(CommandStarted(index, stamp=self._clock))
                if isinstance(command, Move):
                    # Validation guarantees reachability.
                    goal = inverse_kinematics(self.profile, Pose(command.x, command.y, command.z))
                    trajectory, motion = self._plan_motion(goal, command_index=index)
                    events.append(TrajectoryPlanned(index, trajectory, stamp=self._clock))
                    if motion is not None:
                        self._motion = motion
                        return
                    # Zero-length move: finishes at the same instant.
                    events.append(CommandFinished(index, stamp=self._clock))
                    self._command_started = False
                    self._next_index = index + 1
                    continue
            if self._paused:
                return  # started commands wait for resume
            if isinstance(command, Suction):
                events.extend(self.set_suction(command.enabled))
                events.append(CommandFinished(index, stamp=self._clock))
                self._command_started = False
                self._next_index = index + 1
                continue
            return  # move with a pending motion

    def _sweep(
        self,
        motion: _Motion,
        consume: float,
        exact_end: Optional[float],
        events: list[SimEvent],
    ) -> bool:
        """Advance the active motion by ``consume`` wall seconds with collision checks.

        Returns True when a collision aborted execution; otherwise leaves
        the clock and joints at the end of the span (snapping exactly to
        the goal when ``exact_end`` is given).
        """
        factor = self._speed_factor
        substeps = max(1, math.ceil(max(consume, consume * factor) / COLLISION_SUBSTEP_S))
        base_clock = self._clock
        prev_joints = self._joints
        prev_tip = robot_to_world(self.scene, forward_kinematics(self.profile, prev_joints))
        for k in range(1, substeps + 1):
            if exact_end is not None and k == substeps:
                clock_k = exact_end
                joints_k = motion.goal
            else:
                clock_k = base_clock + consume * (k / substeps)
                joints_k = _lerp(motion.start, motion.goal, self._fraction_at(motion, clock_k))
            tip_k = robot_to_world(self.scene, forward_kinematics(self.profile, joints_k))
            hit = self._first_contact(prev_tip, tip_k)
            if hit is not None:
                obj, contact = hit
                safe_clock = base_clock + consume * ((k - 1) / substeps) if k > 1 else base_clock
                self._clock = safe_clock
                self._joints = prev_joints
                self._track_held()
                self._paused = True
                index = motion.command_index
                self._motion = None
                self._program = None
                self._command_started = False
                self._current_command = index
                events.append(Collision(obj.id, index, contact, stamp=safe_clock))
                if index is not None:
                    events.append(ProgramFinished("collision", stamp=safe_clock))
                return True
            prev_joints = joints_k
            prev_tip = tip_k
        if exact_end is not None:
            self._clock = exact_end
            self._joints = motion.goal
        else:
            self._clock = base_clock + consume
            self._joints = prev_joints
        self._track_held()
        return False

    def _first_contact(self, start: Pose, end: Pose) -> Optional[tuple[SceneObject, Pose]]:
        """Earliest box contact along the swept tip segment; held objects are exempt."""
        best: Optional[tuple[tuple[float, str], SceneObject, Pose]] = None
        for obj in self.scene.objects:
            if obj.attached:
                continue
            contact = segment_aabb_contact(start.as_tuple(), end.as_tuple(), obj.aabb())
            if contact is None:
                continue
            d2 = (
                (contact[0] - start.x) ** 2
                + (contact[1] - start.y) ** 2
                + (contact[2] - start.z) ** 2
            )
            key = (d2, obj.id)
            if best is None or key < best[0]:
                best = (key, obj, Pose(*contact))
        if best is None:
            return None
        return best[1], best[2]

    def _nearest_pickable(self) -> Optional[SceneObject]:
        tip = self.tip_world()
        best: Optional[tuple[tuple[float, str], SceneObject]] = None
        for obj in self.scene.objects:
            if obj.attached:
                continue
            top = obj.top_center()
            distance = math.dist(tip.as_tuple(), top.as_tuple())
            if distance > PICK_TOLERANCE_MM:
                continue
            key = (distance, obj.id)
            if best is None or key < best[0]:
                best = (key, obj)
        return best[1] if best else None

    def _track_held(self) -> None:
        if self._held is None:
            return
        obj = self.scene.object_by_id(self._held)
        assert obj is not None
        tip = self.tip_world()
        obj.center = Pose(
            tip.x + self._held_offset[0],
            tip.y + self._held_offset[1],
            tip.z + self._held_offset[2],
        )
