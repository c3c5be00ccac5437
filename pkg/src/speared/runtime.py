"""Service runtime: envelope dispatch over one simulator and one code store.

All mutations funnel through :meth:`Runtime.handle_frame` (and the clock
through :meth:`tick`), which the hosting server calls from a single loop;
that serialization gives every client the same total order of state
changes and event publications.

Publication order after each mutation is fixed: simulator events in
emission order (execution/trajectory/joint topics), then derived state
topics that changed (end effector, detected objects, idle). The reply to a
call is enqueued after the mutation's own events; in eager mode the
drain-to-completion events follow the reply.

Two stepping modes:

* eager (headless/tests): any dispatch that leaves the simulator busy is
  immediately stepped to completion at a fixed dt, so the full event burst
  is deterministic and needs no wall time.
* ticked (live serving): the server calls :meth:`tick` on a wall-clock
  cadence with the same fixed dt, so content stays reproducible while
  clients see motion in near real time.
"""
from __future__ import annotations

from typing import Optional

from . import protocol
from .codestore import CodeStore, StoreConflict
from .dsl import InterchangeError, program_from_dict, program_to_dict
from .hub import FrameSink, Subscription, TopicHub
from .kinematics import Pose, Unreachable, forward_kinematics
from .profiles import ArmProfile
from .protocol import (
    ERR_BAD_PAYLOAD,
    ERR_CONFLICT,
    ERR_NOT_IDLE,
    ERR_UNKNOWN_CHANNEL,
    ERR_UNREACHABLE,
    ERR_VALIDATION_FAILED,
    Envelope,
    FrameError,
    decode_frame,
    error_frame,
    reply_frame,
)
from .scene import Scene
from .sim import (
    Collision,
    CommandFinished,
    CommandStarted,
    InvalidFactor,
    JointStateChanged,
    NotIdleError,
    ObjectPicked,
    ObjectReleased,
    ProgramFinished,
    SimEvent,
    Simulator,
    TrajectoryPlanned,
    ValidationFailedError,
    event_to_payload,
)
from .vendor import UnknownDialect, VendorParseError, parse_vendor, translate_to_vendor


class Runtime:
    def __init__(
        self,
        profile: ArmProfile,
        scene: Scene,
        *,
        eager: bool = True,
        step_dt: float = 0.02,
        queue_limit: int = 1024,
    ) -> None:
        self.profile = profile
        self.sim = Simulator(profile, scene)
        self.store = CodeStore()
        self.hub = TopicHub(protocol.TOPICS, queue_limit=queue_limit)
        self.eager = eager
        self.step_dt = step_dt
        self._seed_retained()
        self._handlers = {
            protocol.SERVICE_MOVE_TO: self._call_move_to,
            protocol.SERVICE_SET_SUCTION: self._call_set_suction,
            protocol.SERVICE_EXECUTE: self._call_execute,
            protocol.SERVICE_PHYSICS: self._call_physics,
            protocol.SERVICE_STATE_JOINTS: self._call_state_joints,
            protocol.SERVICE_STATE_END_EFFECTOR: self._call_state_end_effector,
            protocol.SERVICE_STATE_IDLE: self._call_state_idle,
            protocol.SERVICE_DETECT_OBJECTS: self._call_detect_objects,
            protocol.SERVICE_CODE_STORE: self._call_code_store,
            protocol.SERVICE_CODE_LOAD: self._call_code_load,
            protocol.SERVICE_TRANSLATE: self._call_translate,
            protocol.SERVICE_PARSE_VENDOR: self._call_parse_vendor,
            protocol.SERVICE_DESCRIBE: self._call_describe,
        }

    # ---------------------------------------------------------------- frames

    def handle_frame(self, text: str, sink: FrameSink) -> None:
        """Process one inbound frame; all output goes through ``sink``/hub."""
        try:
            envelope = decode_frame(text)
        except FrameError as exc:
            sink.enqueue(error_frame(exc.frame_id, "", ERR_BAD_PAYLOAD, str(exc)), None)
            return
        if envelope.kind == "subscribe":
            self._handle_subscribe(envelope, sink)
        elif envelope.kind == "call":
            self._handle_call(envelope, sink)
        else:
            sink.enqueue(
                error_frame(
                    envelope.id,
                    envelope.channel,
                    ERR_BAD_PAYLOAD,
                    f"clients may not send {envelope.kind!r} frames",
                ),
                None,
            )

    def subscribe(self, channel: str, sub_id: str, sink: FrameSink) -> Subscription:
        return self.hub.subscribe(channel, sub_id, sink)

    def _handle_subscribe(self, envelope: Envelope, sink: FrameSink) -> None:
        if envelope.channel not in protocol.TOPICS:
            sink.enqueue(
                error_frame(
                    envelope.id,
                    envelope.channel,
                    ERR_UNKNOWN_CHANNEL,
                    f"unknown topic {envelope.channel!r}",
                ),
                None,
            )
            return
        self.hub.subscribe(envelope.channel, envelope.id, sink)

    def _handle_call(self, envelope: Envelope, sink: FrameSink) -> None:
        handler = self._handlers.get(envelope.channel)
        if handler is None:
            sink.enqueue(
                error_frame(
                    envelope.id,
                    envelope.channel,
                    ERR_UNKNOWN_CHANNEL,
                    f"unknown service {envelope.channel!r}",
                ),
                None,
            )
            return
        try:
            reply_payload = handler(envelope.payload)
        except ServiceError as exc:
            sink.enqueue(
                error_frame(envelope.id, envelope.channel, exc.code, exc.message, **exc.extra),
                None,
            )
            return
        sink.enqueue(reply_frame(envelope.id, envelope.channel, reply_payload), None)
        if self.eager:
            self.drain()

    # -------------------------------------------------------------- stepping

    def tick(self, dt: Optional[float] = None) -> None:
        """Advance the simulation one step and publish what changed."""
        if self.sim.idle:
            return
        self._run_sim(lambda: self.sim.step(self.step_dt if dt is None else dt))

    def drain(self) -> None:
        """Step to completion at the fixed dt (no wall time passes)."""
        state = self.sim.state()
        while not self.sim.idle and not state.paused:
            self.tick()
            state = self.sim.state()

    # ------------------------------------------------------------- services

    def _call_move_to(self, payload: dict) -> dict:
        target = _pose_from_payload(payload)
        events = self._run_sim_service(lambda: self.sim.move_to(target))
        del events
        return {"accepted": True}

    def _call_set_suction(self, payload: dict) -> dict:
        enabled = payload.get("enabled")
        if not isinstance(enabled, bool):
            raise ServiceError(ERR_BAD_PAYLOAD, "'enabled' must be a boolean")
        self._run_sim_service(lambda: self.sim.set_suction(enabled))
        state = self.sim.state()
        return {"suction": state.suction, "held_object": state.held_object}

    def _call_execute(self, payload: dict) -> dict:
        program_field = payload.get("program")
        dialect = payload.get("dialect")
        if payload.get("use_stored"):
            stored, _revision = self.store.load()
            program = program_from_dict(stored)
        elif dialect is not None:
            if not isinstance(program_field, str):
                raise ServiceError(
                    ERR_BAD_PAYLOAD, "'program' must be vendor source text when 'dialect' is given"
                )
            try:
                program = parse_vendor(program_field, dialect)
            except UnknownDialect as exc:
                raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc
            except VendorParseError as exc:
                raise ServiceError(ERR_BAD_PAYLOAD, f"vendor text does not parse: {exc}") from exc
        else:
            try:
                program = program_from_dict(program_field)
            except InterchangeError as exc:
                raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc
        self._run_sim_service(lambda: self.sim.submit_program(program))
        return {"accepted": True, "commands": len(program.commands)}

    def _call_physics(self, payload: dict) -> dict:
        action = payload.get("action")
        if action not in ("pause", "resume", "set_speed"):
            raise ServiceError(ERR_BAD_PAYLOAD, "'action' must be pause, resume, or set_speed")
        factor = payload.get("factor")
        try:
            self._run_sim_service(lambda: self.sim.set_physics(action, factor))
        except ServiceError:
            raise
        state = self.sim.state()
        return {"paused": state.paused, "speed_factor": state.speed_factor}

    def _call_state_joints(self, payload: dict) -> dict:
        q = self.sim.joints
        return {"theta1": q.theta1, "theta2": q.theta2, "theta3": q.theta3}

    def _call_state_end_effector(self, payload: dict) -> dict:
        return self._end_effector_payload(stamped=False)

    def _call_state_idle(self, payload: dict) -> dict:
        return {"idle": self.sim.idle}

    def _call_detect_objects(self, payload: dict) -> dict:
        return {"objects": self.sim.detect_objects()}

    def _call_code_store(self, payload: dict) -> dict:
        program = payload.get("program")
        expected = payload.get("expected_revision")
        client = payload.get("client")
        if isinstance(expected, bool) or not isinstance(expected, int):
            raise ServiceError(ERR_BAD_PAYLOAD, "'expected_revision' must be an integer")
        if not isinstance(client, str) or not client:
            raise ServiceError(ERR_BAD_PAYLOAD, "'client' must be a non-empty string")
        try:
            revision = self.store.store(program, expected, client)
        except InterchangeError as exc:
            raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc
        except StoreConflict as exc:
            raise ServiceError(
                ERR_CONFLICT,
                str(exc),
                current_revision=exc.current_revision,
                program=exc.program,
            ) from exc
        self.hub.publish(
            protocol.TOPIC_CODE,
            {
                "revision": revision,
                "program": program,
                "last_writer": client,
                "stamp": self.sim.clock,
            },
        )
        return {"revision": revision}

    def _call_code_load(self, payload: dict) -> dict:
        program, revision = self.store.load()
        return {"program": program, "revision": revision}

    def _call_translate(self, payload: dict) -> dict:
        program_field = payload.get("program")
        dialect = payload.get("dialect")
        if not isinstance(dialect, str):
            raise ServiceError(ERR_BAD_PAYLOAD, "'dialect' must be a string")
        try:
            program = program_from_dict(program_field)
            text = translate_to_vendor(program, dialect)
        except (InterchangeError, UnknownDialect) as exc:
            raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc
        return {"text": text, "dialect": dialect}

    def _call_parse_vendor(self, payload: dict) -> dict:
        text = payload.get("text")
        dialect = payload.get("dialect")
        if not isinstance(text, str):
            raise ServiceError(ERR_BAD_PAYLOAD, "'text' must be a string")
        if not isinstance(dialect, str):
            raise ServiceError(ERR_BAD_PAYLOAD, "'dialect' must be a string")
        try:
            program = parse_vendor(text, dialect)
        except (UnknownDialect, VendorParseError) as exc:
            raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc
        return {"program": program_to_dict(program)}

    def _call_describe(self, payload: dict) -> dict:
        return {
            "profile": self.profile.to_dict(),
            "robot_base": self.sim.scene.robot_base.to_dict(),
        }

    # ------------------------------------------------------------ publishing

    def _run_sim_service(self, operation):
        """Run a simulator mutation for a service call, mapping its errors."""
        try:
            return self._run_sim(operation)
        except NotIdleError as exc:
            raise ServiceError(ERR_NOT_IDLE, str(exc)) from exc
        except ValidationFailedError as exc:
            raise ServiceError(
                ERR_VALIDATION_FAILED,
                str(exc),
                diagnostics=[
                    {
                        "command_index": d.command_index,
                        "severity": d.severity,
                        "code": d.code,
                        "message": d.message,
                    }
                    for d in exc.diagnostics
                ],
            ) from exc
        except Unreachable as exc:
            raise ServiceError(ERR_UNREACHABLE, str(exc), reason=exc.reason) from exc
        except InvalidFactor as exc:
            raise ServiceError(ERR_BAD_PAYLOAD, str(exc)) from exc

    def _run_sim(self, operation):
        """Run a simulator mutation and publish resulting events plus derived state."""
        before = self.sim.state()
        objects_before = self._objects_signature()
        events: list[SimEvent] = operation() or []
        self._publish_events(events)
        self._publish_derived(before, objects_before)
        return events

    def _publish_events(self, events: list[SimEvent]) -> None:
        for event in events:
            payload = event_to_payload(event)
            if isinstance(event, JointStateChanged):
                payload.pop("event")
                self.hub.publish(protocol.TOPIC_JOINT_STATES, payload)
            elif isinstance(event, TrajectoryPlanned):
                payload.pop("event")
                self.hub.publish(protocol.TOPIC_TRAJECTORY, payload)
            elif isinstance(
                event,
                (
                    CommandStarted,
                    CommandFinished,
                    Collision,
                    ObjectPicked,
                    ObjectReleased,
                    ProgramFinished,
                ),
            ):
                self.hub.publish(protocol.TOPIC_EXECUTION, payload)

    def _publish_derived(self, before, objects_before) -> None:
        after = self.sim.state()
        if (before.suction, before.held_object) != (after.suction, after.held_object):
            self.hub.publish(protocol.TOPIC_END_EFFECTOR, self._end_effector_payload())
        if self._objects_signature() != objects_before:
            self.hub.publish(
                protocol.TOPIC_DETECTED_OBJECTS,
                {"objects": self.sim.detect_objects(), "stamp": self.sim.clock},
            )
        if before.idle != after.idle:
            self.hub.publish(protocol.TOPIC_IDLE, {"idle": after.idle, "stamp": self.sim.clock})

    def _objects_signature(self):
        return tuple(
            (obj.id, obj.center.as_tuple(), obj.attached) for obj in self.sim.scene.objects
        )

    def _end_effector_payload(self, stamped: bool = True) -> dict:
        state = self.sim.state()
        tip = forward_kinematics(self.profile, state.joints)
        payload = {
            "suction": state.suction,
            "held_object": state.held_object,
            "tip": {"x": tip.x, "y": tip.y, "z": tip.z},
        }
        if stamped:
            payload["stamp"] = state.clock
        return payload

    def _seed_retained(self) -> None:
        q = self.sim.joints
        self.hub.set_retained(
            protocol.TOPIC_JOINT_STATES,
            {"theta1": q.theta1, "theta2": q.theta2, "theta3": q.theta3, "stamp": 0.0},
        )
        self.hub.set_retained(protocol.TOPIC_IDLE, {"idle": True, "stamp": 0.0})
        payload = self._end_effector_payload(stamped=False)
        payload["stamp"] = 0.0
        self.hub.set_retained(protocol.TOPIC_END_EFFECTOR, payload)
        self.hub.set_retained(
            protocol.TOPIC_DETECTED_OBJECTS,
            {"objects": self.sim.detect_objects(), "stamp": 0.0},
        )
        self.hub.set_retained(
            protocol.TOPIC_TRAJECTORY,
            {"command_index": None, "duration": 0.0, "waypoints": [], "stamp": 0.0},
        )
        self.hub.set_retained(
            protocol.TOPIC_EXECUTION,
            {"event": "snapshot", "idle": True, "current_command": None, "stamp": 0.0},
        )
        program, revision = self.store.load()
        self.hub.set_retained(
            protocol.TOPIC_CODE,
            {"revision": revision, "program": program, "last_writer": None, "stamp": 0.0},
        )


class ServiceError(Exception):
    """Dispatch-level failure mapped to an error envelope."""

    def __init__(self, code: str, message: str, **extra) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.extra = extra


def _pose_from_payload(payload: dict) -> Pose:
    values = []
    for field in ("x", "y", "z"):
        value = payload.get(field)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ServiceError(ERR_BAD_PAYLOAD, f"'{field}' must be a number")
        values.append(float(value))
    return Pose(*values)
