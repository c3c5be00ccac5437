"""Vendor-independent robot program representation.

A program is an ordered list of two command kinds: a move to a Cartesian
point in the robot base frame, and a suction-cup toggle. The textual form
is one command per line:

    move <x> <y> <z>
    suction on|off

Keywords are case-insensitive, ``#`` starts a comment, and blank lines are
skipped. ``serialize_program`` emits the canonical form (lowercase
keywords, minimal decimal coordinates), so parse(serialize(p)) == p.

The same AST has a JSON interchange form used on the wire and in the code
store:

    {"name": str, "commands": [{"type": "move", "x": .., "y": .., "z": ..}
                               | {"type": "suction", "enabled": bool}]}
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Union

from .kinematics import Pose, is_reachable
from .profiles import ArmProfile

DEFAULT_PROGRAM_NAME = "program"

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class ParseError(ValueError):
    """Malformed DSL source. Carries 1-based line/column and what was expected."""

    def __init__(self, line: int, column: int, expected: str) -> None:
        super().__init__(f"line {line}, column {column}: expected {expected}")
        self.line = line
        self.column = column
        self.expected = expected


class IndexOutOfBounds(IndexError):
    """Edit index outside the program at application time."""


class InterchangeError(ValueError):
    """Program JSON does not match the interchange schema."""


@dataclass(frozen=True)
class Move:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for value in (self.x, self.y, self.z):
            if not math.isfinite(value):
                raise ValueError("move coordinates must be finite")


@dataclass(frozen=True)
class Suction:
    enabled: bool


Command = Union[Move, Suction]


@dataclass(frozen=True)
class Program:
    commands: tuple[Command, ...] = ()
    name: str = DEFAULT_PROGRAM_NAME

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise ValueError(
                "program name must be 1-64 characters of [A-Za-z0-9_-]"
            )

    def __len__(self) -> int:
        return len(self.commands)


@dataclass(frozen=True)
class Add:
    index: int
    command: Command


@dataclass(frozen=True)
class Delete:
    index: int


@dataclass(frozen=True)
class Modify:
    index: int
    command: Command


@dataclass(frozen=True)
class Reorder:
    from_index: int
    to_index: int


Edit = Union[Add, Delete, Modify, Reorder]


@dataclass(frozen=True)
class Diagnostic:
    command_index: int
    severity: str  # "error" | "warning"
    code: str
    message: str


def parse_program(text: str, name: str = DEFAULT_PROGRAM_NAME) -> Program:
    """Parse DSL source into a Program.

    The textual form carries no program name; callers supply one (for
    files, typically the file stem).
    """
    commands: list[Command] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        col, keyword = tokens[0]
        kw = keyword.lower()
        if kw == "move":
            if len(tokens) < 4:
                ordinal = ("first", "second", "third")[len(tokens) - 1]
                raise ParseError(line_no, len(line) + 1, f"{ordinal} coordinate")
            if len(tokens) > 4:
                raise ParseError(line_no, tokens[4][0], "end of line")
            coords = [_parse_number(tok, line_no, c) for c, tok in tokens[1:4]]
            commands.append(Move(*coords))
        elif kw == "suction":
            if len(tokens) < 2:
                raise ParseError(line_no, len(line) + 1, "'on' or 'off'")
            if len(tokens) > 2:
                raise ParseError(line_no, tokens[2][0], "end of line")
            state_col, state = tokens[1]
            if state.lower() not in ("on", "off"):
                raise ParseError(line_no, state_col, "'on' or 'off'")
            commands.append(Suction(state.lower() == "on"))
        else:
            raise ParseError(line_no, col, "'move' or 'suction'")
    return Program(tuple(commands), name)


def serialize_program(program: Program) -> str:
    """Emit the canonical text form: lowercase keywords, minimal decimals."""
    lines = []
    for command in program.commands:
        if isinstance(command, Move):
            lines.append(
                f"move {format_coordinate(command.x)} "
                f"{format_coordinate(command.y)} {format_coordinate(command.z)}"
            )
        else:
            lines.append(f"suction {'on' if command.enabled else 'off'}")
    return "\n".join(lines)


def format_coordinate(value: float) -> str:
    """Shortest decimal that parses back to the same float; integral values drop '.0'."""
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def apply_edit(program: Program, edit: Edit) -> Program:
    """Return a new Program with the edit applied; the input is untouched."""
    commands = list(program.commands)
    n = len(commands)
    if isinstance(edit, Add):
        if not 0 <= edit.index <= n:
            raise IndexOutOfBounds(f"add index {edit.index} outside 0..{n}")
        commands.insert(edit.index, edit.command)
    elif isinstance(edit, Delete):
        if not 0 <= edit.index < n:
            raise IndexOutOfBounds(f"delete index {edit.index} outside 0..{n - 1}")
        del commands[edit.index]
    elif isinstance(edit, Modify):
        if not 0 <= edit.index < n:
            raise IndexOutOfBounds(f"modify index {edit.index} outside 0..{n - 1}")
        commands[edit.index] = edit.command
    elif isinstance(edit, Reorder):
        if not 0 <= edit.from_index < n:
            raise IndexOutOfBounds(f"reorder source {edit.from_index} outside 0..{n - 1}")
        if not 0 <= edit.to_index < n:
            raise IndexOutOfBounds(f"reorder target {edit.to_index} outside 0..{n - 1}")
        command = commands.pop(edit.from_index)
        commands.insert(edit.to_index, command)
    else:
        raise TypeError(f"unknown edit {edit!r}")
    return replace(program, commands=tuple(commands))


def validate_program(program: Program, profile: ArmProfile) -> list[Diagnostic]:
    """Static checks: unreachable move targets (errors) and redundant suction toggles (warnings).

    Diagnostics come back sorted by command index. An empty list means the
    program is executable.
    """
    diagnostics: list[Diagnostic] = []
    previous_suction: bool | None = None
    for index, command in enumerate(program.commands):
        if isinstance(command, Move):
            previous_suction = None
            if not is_reachable(profile, Pose(command.x, command.y, command.z)):
                diagnostics.append(
                    Diagnostic(
                        command_index=index,
                        severity="error",
                        code="unreachable_target",
                        message=(
                            f"move target ({format_coordinate(command.x)}, "
                            f"{format_coordinate(command.y)}, "
                            f"{format_coordinate(command.z)}) is not reachable"
                        ),
                    )
                )
        else:
            if previous_suction is not None and previous_suction == command.enabled:
                state = "on" if command.enabled else "off"
                diagnostics.append(
                    Diagnostic(
                        command_index=index,
                        severity="warning",
                        code="redundant_suction",
                        message=f"suction is already {state}",
                    )
                )
            previous_suction = command.enabled
    return diagnostics


def program_to_dict(program: Program) -> dict:
    """JSON interchange form with fixed field names."""
    commands = []
    for command in program.commands:
        if isinstance(command, Move):
            commands.append({"type": "move", "x": command.x, "y": command.y, "z": command.z})
        else:
            commands.append({"type": "suction", "enabled": command.enabled})
    return {"name": program.name, "commands": commands}


def program_from_dict(data: object) -> Program:
    """Parse the JSON interchange form, rejecting anything off-schema."""
    if not isinstance(data, dict):
        raise InterchangeError("program document must be a JSON object")
    if set(data.keys()) != {"name", "commands"}:
        raise InterchangeError("program document must have exactly 'name' and 'commands'")
    name = data["name"]
    if not isinstance(name, str):
        raise InterchangeError("program name must be a string")
    if not isinstance(data["commands"], list):
        raise InterchangeError("'commands' must be an array")
    commands: list[Command] = []
    for i, entry in enumerate(data["commands"]):
        if not isinstance(entry, dict):
            raise InterchangeError(f"command {i} must be an object")
        kind = entry.get("type")
        if kind == "move":
            if set(entry.keys()) != {"type", "x", "y", "z"}:
                raise InterchangeError(f"move command {i} must have exactly x, y, z")
            try:
                commands.append(
                    Move(
                        _interchange_number(entry["x"], i, "x"),
                        _interchange_number(entry["y"], i, "y"),
                        _interchange_number(entry["z"], i, "z"),
                    )
                )
            except ValueError as exc:
                raise InterchangeError(f"command {i}: {exc}") from exc
        elif kind == "suction":
            if set(entry.keys()) != {"type", "enabled"}:
                raise InterchangeError(f"suction command {i} must have exactly 'enabled'")
            if not isinstance(entry["enabled"], bool):
                raise InterchangeError(f"command {i}: 'enabled' must be a boolean")
            commands.append(Suction(entry["enabled"]))
        else:
            raise InterchangeError(f"command {i} has unknown type {kind!r}")
    try:
        return Program(tuple(commands), name)
    except ValueError as exc:
        raise InterchangeError(str(exc)) from exc


def _interchange_number(value: object, index: int, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InterchangeError(f"command {index}: '{field}' must be a number")
    return float(value)


def _parse_number(token: str, line: int, column: int) -> float:
    if not _NUMBER_RE.match(token):
        raise ParseError(line, column, "a number")
    value = float(token)
    if not math.isfinite(value):
        raise ParseError(line, column, "a finite number")
    return value
