"""Wire protocol: one JSON envelope per text frame.

Every frame is a newline-free JSON object with exactly these fields:

    {"kind": "call|reply|subscribe|event|error", "id": str,
     "channel": str, "payload": {...}}

Replies and errors echo the originating call's id; events carry the topic
channel and the id of the subscribe frame that opened the stream. Frames
are encoded canonically (sorted keys, compact separators) so identical
traffic is byte-identical across runs.
"""
from __future__ import annotations

import json
from typing import Literal

from pydantic import BaseModel, ConfigDict, ValidationError

SERVICE_MOVE_TO = "service:move_to"
SERVICE_SET_SUCTION = "service:set_suction"
SERVICE_EXECUTE = "service:execute"
SERVICE_PHYSICS = "service:physics"
SERVICE_STATE_JOINTS = "service:state.joints"
SERVICE_STATE_END_EFFECTOR = "service:state.end_effector"
SERVICE_STATE_IDLE = "service:state.idle"
SERVICE_DETECT_OBJECTS = "service:detect_objects"
SERVICE_CODE_STORE = "service:code.store"
SERVICE_CODE_LOAD = "service:code.load"
SERVICE_TRANSLATE = "service:translate"
SERVICE_PARSE_VENDOR = "service:parse_vendor"
SERVICE_DESCRIBE = "service:describe"  # profile + base placement for clients that render

TOPIC_JOINT_STATES = "topic:joint_states"
TOPIC_IDLE = "topic:idle"
TOPIC_END_EFFECTOR = "topic:end_effector"
TOPIC_DETECTED_OBJECTS = "topic:detected_objects"
TOPIC_TRAJECTORY = "topic:trajectory"
TOPIC_EXECUTION = "topic:execution"
TOPIC_CODE = "topic:code"

SERVICES = frozenset(
    {
        SERVICE_MOVE_TO,
        SERVICE_SET_SUCTION,
        SERVICE_EXECUTE,
        SERVICE_PHYSICS,
        SERVICE_STATE_JOINTS,
        SERVICE_STATE_END_EFFECTOR,
        SERVICE_STATE_IDLE,
        SERVICE_DETECT_OBJECTS,
        SERVICE_CODE_STORE,
        SERVICE_CODE_LOAD,
        SERVICE_TRANSLATE,
        SERVICE_PARSE_VENDOR,
        SERVICE_DESCRIBE,
    }
)

TOPICS = frozenset(
    {
        TOPIC_JOINT_STATES,
        TOPIC_IDLE,
        TOPIC_END_EFFECTOR,
        TOPIC_DETECTED_OBJECTS,
        TOPIC_TRAJECTORY,
        TOPIC_EXECUTION,
        TOPIC_CODE,
    }
)

ERR_UNKNOWN_CHANNEL = "unknown_channel"
ERR_BAD_PAYLOAD = "bad_payload"
ERR_NOT_IDLE = "not_idle"
ERR_VALIDATION_FAILED = "validation_failed"
ERR_CONFLICT = "conflict"
ERR_UNREACHABLE = "unreachable"

DEFAULT_PORT = 9870
PORT_ENV_VAR = "SPEARED_PORT"


class Envelope(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["call", "reply", "subscribe", "event", "error"]
    id: str
    channel: str
    payload: dict


class FrameError(ValueError):
    """Inbound frame that cannot be interpreted as an envelope.

    ``frame_id`` holds the frame's id when one could be salvaged, so the
    error envelope can still correlate.
    """

    def __init__(self, message: str, frame_id: str = "") -> None:
        super().__init__(message)
        self.frame_id = frame_id


def encode_envelope(kind: str, id: str, channel: str, payload: dict) -> str:
    """Canonical single-line frame; rejects payloads JSON cannot carry."""
    return json.dumps(
        {"kind": kind, "id": id, "channel": channel, "payload": payload},
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    )


def decode_frame(text: str) -> Envelope:
    """Parse one frame, raising :class:`FrameError` with whatever id is salvageable."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameError(f"frame is not valid JSON: {exc}") from exc
    frame_id = ""
    if isinstance(data, dict) and isinstance(data.get("id"), str):
        frame_id = data["id"]
    try:
        return Envelope.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "envelope"
        raise FrameError(f"invalid envelope ({where}: {first['msg']})", frame_id) from exc


def reply_frame(call_id: str, channel: str, payload: dict) -> str:
    return encode_envelope("reply", call_id, channel, payload)


def error_frame(call_id: str, channel: str, code: str, message: str, **extra) -> str:
    payload = {"code": code, "message": message}
    payload.update(extra)
    return encode_envelope("error", call_id, channel, payload)


def event_frame(subscription_id: str, channel: str, payload: dict) -> str:
    return encode_envelope("event", subscription_id, channel, payload)
