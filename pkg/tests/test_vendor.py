from __future__ import annotations

import random

import pytest

from speared import Move, Program, Suction, parse_vendor, translate_to_vendor
from speared.vendor import (
    DOBOT_SCRIPT,
    GCODE_LIKE,
    UnknownDialect,
    VendorDialect,
    VendorParseError,
    dialect_ids,
    format_vendor_number,
    register_dialect,
)

from conftest import random_program


class TestTranslate:
    def test_dobot_move(self):
        assert translate_to_vendor(Program((Move(100, 0, 50),)), DOBOT_SCRIPT) == "PTP 100,0,50"

    def test_gcode_suction_on(self):
        assert translate_to_vendor(Program((Suction(True),)), GCODE_LIKE) == "M10"

    def test_gcode_move_and_suction_off(self):
        program = Program((Move(1.5, -2.25, 3), Suction(False)))
        assert translate_to_vendor(program, GCODE_LIKE) == "G0 X1.5 Y-2.25 Z3\nM11"

    def test_dobot_suction(self):
        program = Program((Suction(True), Suction(False)))
        assert translate_to_vendor(program, DOBOT_SCRIPT) == "SUCK 1\nSUCK 0"

    def test_quantizes_to_micron(self):
        text = translate_to_vendor(Program((Move(1.23456, 0.0004, -0.0006),)), DOBOT_SCRIPT)
        assert text == "PTP 1.235,0,-0.001"

    def test_unknown_dialect(self):
        with pytest.raises(UnknownDialect):
            translate_to_vendor(Program(), "kuka")

    def test_line_count_equals_command_count(self):
        rng = random.Random(3)
        for _ in range(50):
            program = random_program(rng)
            for dialect in (DOBOT_SCRIPT, GCODE_LIKE):
                text = translate_to_vendor(program, dialect)
                lines = text.splitlines()
                assert len(lines) == len(program.commands)


class TestParse:
    def test_dobot_move(self):
        assert parse_vendor("PTP 1,2,3", DOBOT_SCRIPT).commands == (Move(1, 2, 3),)

    def test_gcode_suction_off(self):
        assert parse_vendor("M11", GCODE_LIKE).commands == (Suction(False),)

    def test_unsupported_opcode(self):
        with pytest.raises(VendorParseError) as exc_info:
            parse_vendor("G1 X1", GCODE_LIKE)
        assert exc_info.value.line == 1

    def test_tolerates_surrounding_whitespace(self):
        program = parse_vendor("  PTP 1 , 2 , 3  \n\n  SUCK 1\n", DOBOT_SCRIPT)
        assert program.commands == (Move(1, 2, 3), Suction(True))

    def test_rejects_unknown_dobot_line(self):
        with pytest.raises(VendorParseError):
            parse_vendor("HOME", DOBOT_SCRIPT)

    def test_error_carries_line_number(self):
        with pytest.raises(VendorParseError) as exc_info:
            parse_vendor("M10\nM12", GCODE_LIKE)
        assert exc_info.value.line == 2


class TestRoundTrips:
    def test_round_trip_1000_random_programs_both_dialects(self):
        rng = random.Random(20260809)
        for _ in range(1000):
            program = random_program(rng)  # coordinates on the 1e-3 grid
            for dialect in (DOBOT_SCRIPT, GCODE_LIKE):
                text = translate_to_vendor(program, dialect)
                assert parse_vendor(text, dialect, name=program.name) == program

    def test_cross_dialect_equivalence(self):
        rng = random.Random(11)
        for _ in range(300):
            program = random_program(rng)
            via_dobot = parse_vendor(translate_to_vendor(program, DOBOT_SCRIPT), DOBOT_SCRIPT)
            via_gcode = parse_vendor(translate_to_vendor(program, GCODE_LIKE), GCODE_LIKE)
            assert via_dobot == via_gcode


class TestRegistry:
    def test_built_in_dialects_registered(self):
        assert dialect_ids() == [DOBOT_SCRIPT, GCODE_LIKE]

    def test_extensible_by_id(self):
        def emit(command):
            return "NOP"

        def parse(line, line_no):
            raise VendorParseError(line_no, "write-only dialect")

        register_dialect(VendorDialect("nop-only", emit, parse))
        try:
            assert translate_to_vendor(Program((Suction(True),)), "nop-only") == "NOP"
        finally:
            from speared.vendor import _REGISTRY

            _REGISTRY.pop("nop-only")


class TestNumberFormat:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (100.0, "100"),
            (1.5, "1.5"),
            (-0.25, "-0.25"),
            (0.1239, "0.124"),
            (-0.0004, "-0"),
            (0.0, "0"),
        ],
    )
    def test_formatting(self, value, expected):
        assert format_vendor_number(value) == expected

    def test_format_parse_fixpoint(self):
        rng = random.Random(5)
        for _ in range(2000):
            value = round(rng.uniform(-500, 500), 3)
            assert float(format_vendor_number(value)) == value
