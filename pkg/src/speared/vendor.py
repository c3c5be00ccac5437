"""Translation between the vendor-independent program and robot dialects.

Two mock dialects ship by default and both are lossless for the move /
suction command set:

* ``dobot-script``: ``PTP <x>,<y>,<z>`` and ``SUCK <0|1>``
* ``gcode-like``:   ``G0 X<x> Y<y> Z<z>``, ``M10`` (suction on), ``M11`` (off)

Coordinates are quantized to 1e-3 mm at the translation boundary and
written with up to three decimals (trailing zeros trimmed), so a program
whose coordinates are already on that grid survives a round trip exactly.
Additional dialects can be registered by id.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .dsl import DEFAULT_PROGRAM_NAME, Command, Move, Program, Suction

DOBOT_SCRIPT = "dobot-script"
GCODE_LIKE = "gcode-like"


class UnknownDialect(KeyError):
    """No dialect registered under the requested id."""

    def __init__(self, dialect_id: str) -> None:
        super().__init__(dialect_id)
        self.dialect_id = dialect_id

    def __str__(self) -> str:
        return f"unknown dialect {self.dialect_id!r}"


class VendorParseError(ValueError):
    """A vendor source line that the dialect does not understand."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class VendorDialect:
    id: str
    emit_command: Callable[[Command], str]
    parse_line: Callable[[str, int], Command]


def format_vendor_number(value: float) -> str:
    """Quantize to 1e-3 mm and render with trailing zeros trimmed."""
    quantized = round(float(value), 3)
    text = f"{quantized:.3f}".rstrip("0").rstrip(".")
    return text if text else "0"


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)"
_PTP_RE = re.compile(rf"^PTP\s+({_NUM})\s*,\s*({_NUM})\s*,\s*({_NUM})$", re.IGNORECASE)
_SUCK_RE = re.compile(r"^SUCK\s+([01])$", re.IGNORECASE)
_G0_RE = re.compile(rf"^G0\s+X({_NUM})\s+Y({_NUM})\s+Z({_NUM})$", re.IGNORECASE)


def _emit_dobot(command: Command) -> str:
    if isinstance(command, Move):
        return (
            f"PTP {format_vendor_number(command.x)},"
            f"{format_vendor_number(command.y)},{format_vendor_number(command.z)}"
        )
    return f"SUCK {1 if command.enabled else 0}"


def _parse_dobot(line: str, line_no: int) -> Command:
    match = _PTP_RE.match(line)
    if match:
        return Move(*(float(g) for g in match.groups()))
    match = _SUCK_RE.match(line)
    if match:
        return Suction(match.group(1) == "1")
    raise VendorParseError(line_no, f"not a PTP or SUCK statement: {line!r}")


def _emit_gcode(command: Command) -> str:
    if isinstance(command, Move):
        return (
            f"G0 X{format_vendor_number(command.x)} "
            f"Y{format_vendor_number(command.y)} Z{format_vendor_number(command.z)}"
        )
    return "M10" if command.enabled else "M11"


def _parse_gcode(line: str, line_no: int) -> Command:
    match = _G0_RE.match(line)
    if match:
        return Move(*(float(g) for g in match.groups()))
    upper = line.upper()
    if upper == "M10":
        return Suction(True)
    if upper == "M11":
        return Suction(False)
    raise VendorParseError(line_no, f"unsupported opcode: {line!r}")


_REGISTRY: dict[str, VendorDialect] = {}


def register_dialect(dialect: VendorDialect) -> None:
    _REGISTRY[dialect.id] = dialect


def get_dialect(dialect_id: str) -> VendorDialect:
    try:
        return _REGISTRY[dialect_id]
    except KeyError:
        raise UnknownDialect(dialect_id) from None


def dialect_ids() -> list[str]:
    return sorted(_REGISTRY)


register_dialect(VendorDialect(DOBOT_SCRIPT, _emit_dobot, _parse_dobot))
register_dialect(VendorDialect(GCODE_LIKE, _emit_gcode, _parse_gcode))


def translate_to_vendor(program: Program, dialect_id: str) -> str:
    """Render the program in a vendor dialect, one line per command."""
    dialect = get_dialect(dialect_id)
    return "\n".join(dialect.emit_command(command) for command in program.commands)


def parse_vendor(text: str, dialect_id: str, name: str = DEFAULT_PROGRAM_NAME) -> Program:
    """Parse vendor source back into a Program.

    Surrounding whitespace and blank lines are tolerated; any other
    unrecognized line raises :class:`VendorParseError`.
    """
    dialect = get_dialect(dialect_id)
    commands = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        commands.append(dialect.parse_line(line, line_no))
    return Program(tuple(commands), name)
