"""Desk-scale robot programming environment.

Core pieces: closed-form arm kinematics, a vendor-independent program DSL
with two vendor dialect translators, a kinematic simulator with swept-tip
collision detection and suction pick-and-place, a revisioned code store,
and a JSON-envelope wire protocol served over a WebSocket.
"""
from .dsl import (
    Add,
    Command,
    Delete,
    Diagnostic,
    Edit,
    Modify,
    Move,
    ParseError,
    Program,
    Reorder,
    Suction,
    apply_edit,
    parse_program,
    program_from_dict,
    program_to_dict,
    serialize_program,
    validate_program,
)
from .kinematics import (
    InvalidWaypointCount,
    JointState,
    Pose,
    Trajectory,
    Unreachable,
    forward_kinematics,
    inverse_kinematics,
    is_reachable,
    plan_trajectory,
)
from .profiles import DEFAULT_PROFILE, ArmProfile, load_arm_profile
from .scene import Scene, SceneObject, load_scene, load_scene_file, robot_to_world, world_to_robot
from .sim import SimState, Simulator
from .vendor import parse_vendor, translate_to_vendor

__version__ = "0.1.0"

__all__ = [
    "Add",
    "ArmProfile",
    "Command",
    "DEFAULT_PROFILE",
    "Delete",
    "Diagnostic",
    "Edit",
    "InvalidWaypointCount",
    "JointState",
    "Modify",
    "Move",
    "ParseError",
    "Pose",
    "Program",
    "Reorder",
    "Scene",
    "SceneObject",
    "SimState",
    "Simulator",
    "Suction",
    "Trajectory",
    "Unreachable",
    "apply_edit",
    "forward_kinematics",
    "inverse_kinematics",
    "is_reachable",
    "load_arm_profile",
    "load_scene",
    "load_scene_file",
    "parse_program",
    "parse_vendor",
    "plan_trajectory",
    "program_from_dict",
    "program_to_dict",
    "robot_to_world",
    "serialize_program",
    "translate_to_vendor",
    "validate_program",
    "world_to_robot",
]
