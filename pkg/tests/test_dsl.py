from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speared import (
    DEFAULT_PROFILE,
    Add,
    Delete,
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
from speared.dsl import IndexOutOfBounds, InterchangeError

from conftest import random_program

finite_floats = st.floats(allow_nan=False, allow_infinity=False)
command_strategy = st.one_of(
    st.builds(Move, finite_floats, finite_floats, finite_floats),
    st.builds(Suction, st.booleans()),
)
program_strategy = st.builds(
    Program,
    st.lists(command_strategy, max_size=10).map(tuple),
    st.from_regex(r"[A-Za-z0-9_-]{1,64}", fullmatch=True),
)


class TestParse:
    def test_basic_program(self):
        program = parse_program("move 200 0 50\nsuction on")
        assert program.commands == (Move(200.0, 0.0, 50.0), Suction(True))

    def test_empty_source(self):
        assert parse_program("").commands == ()

    def test_missing_coordinate(self):
        with pytest.raises(ParseError) as exc_info:
            parse_program("move 1 2")
        assert exc_info.value.line == 1
        assert "third coordinate" in exc_info.value.expected

    def test_comments_and_blank_lines(self):
        source = "# a comment\n\nmove 1 2 3  # trailing note\n   \nsuction off"
        program = parse_program(source)
        assert program.commands == (Move(1, 2, 3), Suction(False))

    def test_case_insensitive_keywords(self):
        program = parse_program("MOVE 1 2 3\nSuction ON")
        assert program.commands == (Move(1, 2, 3), Suction(True))

    def test_unknown_keyword_position(self):
        with pytest.raises(ParseError) as exc_info:
            parse_program("move 1 2 3\n  jump 4")
        assert exc_info.value.line == 2
        assert exc_info.value.column == 3

    def test_rejects_non_finite_numbers(self):
        with pytest.raises(ParseError):
            parse_program("move nan 0 0")
        with pytest.raises(ParseError):
            parse_program("move 1e999 0 0")
        with pytest.raises(ParseError):
            parse_program("move 1_0 0 0")

    def test_rejects_extra_tokens(self):
        with pytest.raises(ParseError) as exc_info:
            parse_program("suction on off")
        assert exc_info.value.expected == "end of line"

    def test_bad_suction_state(self):
        with pytest.raises(ParseError) as exc_info:
            parse_program("suction maybe")
        assert "'on' or 'off'" == exc_info.value.expected


class TestSerialize:
    def test_single_suction(self):
        assert serialize_program(Program((Suction(False),))) == "suction off"

    def test_empty_program(self):
        assert serialize_program(Program()) == ""

    def test_minimal_decimals(self):
        text = serialize_program(Program((Move(200.0, 12.5, -0.25),)))
        assert text == "move 200 12.5 -0.25"

    def test_round_trip_1000_random_programs(self):
        rng = random.Random(20260809)
        for _ in range(1000):
            program = random_program(rng, quantized=False)
            assert parse_program(serialize_program(program), name=program.name) == program

    @given(program_strategy)
    @settings(max_examples=300, deadline=None, derandomize=True)
    def test_parse_serialize_identity(self, program: Program):
        assert parse_program(serialize_program(program), name=program.name) == program

    def test_canonicalization_idempotent(self):
        source = "MOVE 1.50 2.0 3  # note\n\nsuction ON"
        once = serialize_program(parse_program(source))
        twice = serialize_program(parse_program(once))
        assert once == twice


class TestApplyEdit:
    def test_add_to_empty(self):
        program = apply_edit(Program(), Add(0, Suction(True)))
        assert program.commands == (Suction(True),)

    def test_reorder_semantics(self):
        a, b, c = Move(1, 1, 1), Move(2, 2, 2), Move(3, 3, 3)
        program = apply_edit(Program((a, b, c)), Reorder(0, 2))
        assert program.commands == (b, c, a)

    def test_delete_out_of_bounds(self):
        with pytest.raises(IndexOutOfBounds):
            apply_edit(Program((Suction(True),)), Delete(3))

    def test_add_allows_index_equal_to_length(self):
        program = apply_edit(Program((Suction(True),)), Add(1, Suction(False)))
        assert program.commands == (Suction(True), Suction(False))

    def test_modify(self):
        program = apply_edit(Program((Move(1, 2, 3),)), Modify(0, Move(4, 5, 6)))
        assert program.commands == (Move(4, 5, 6),)

    def test_value_semantics(self):
        original = Program((Move(1, 2, 3),))
        apply_edit(original, Delete(0))
        assert original.commands == (Move(1, 2, 3),)

    @given(program_strategy, st.integers(0, 10), command_strategy)
    @settings(max_examples=200, deadline=None, derandomize=True)
    def test_add_then_delete_is_identity(self, program, index, command):
        index = index % (len(program) + 1)
        assert apply_edit(apply_edit(program, Add(index, command)), Delete(index)) == program

    @given(program_strategy, st.integers(0, 10), command_strategy)
    @settings(max_examples=200, deadline=None, derandomize=True)
    def test_edits_touch_only_their_index(self, program, index, command):
        index = index % (len(program) + 1)
        edited = apply_edit(program, Add(index, command))
        assert edited.commands[:index] == program.commands[:index]
        assert edited.commands[index + 1 :] == program.commands[index:]


class TestValidate:
    def test_reachable_move_is_clean(self):
        assert validate_program(Program((Move(282, 0, 138),)), DEFAULT_PROFILE) == []

    def test_unreachable_move(self):
        diagnostics = validate_program(Program((Move(1000, 0, 0),)), DEFAULT_PROFILE)
        assert len(diagnostics) == 1
        assert diagnostics[0].severity == "error"
        assert diagnostics[0].code == "unreachable_target"
        assert diagnostics[0].command_index == 0

    def test_redundant_suction(self):
        diagnostics = validate_program(Program((Suction(True), Suction(True))), DEFAULT_PROFILE)
        assert [(d.command_index, d.severity, d.code) for d in diagnostics] == [
            (1, "warning", "redundant_suction")
        ]

    def test_suction_pairs_split_by_move_are_fine(self):
        program = Program((Suction(True), Move(282, 0, 138), Suction(True)))
        assert validate_program(program, DEFAULT_PROFILE) == []

    def test_diagnostics_sorted_by_index(self):
        program = Program(
            (Move(1000, 0, 0), Suction(True), Suction(True), Move(2000, 0, 0))
        )
        diagnostics = validate_program(program, DEFAULT_PROFILE)
        indices = [d.command_index for d in diagnostics]
        assert indices == sorted(indices)
        assert indices == [0, 2, 3]


class TestInterchange:
    def test_shape(self):
        program = Program((Move(1, 2.5, 3), Suction(True)), "demo")
        assert program_to_dict(program) == {
            "name": "demo",
            "commands": [
                {"type": "move", "x": 1.0, "y": 2.5, "z": 3.0},
                {"type": "suction", "enabled": True},
            ],
        }

    def test_round_trip(self):
        rng = random.Random(7)
        for _ in range(200):
            program = random_program(rng)
            assert program_from_dict(program_to_dict(program)) == program

    @pytest.mark.parametrize(
        "document",
        [
            "not a dict",
            {},
            {"name": "x", "commands": [{"type": "move", "x": 1, "y": 2}]},
            {"name": "x", "commands": [{"type": "teleport"}]},
            {"name": "x", "commands": [{"type": "suction", "enabled": 1}]},
            {"name": "x", "commands": [{"type": "move", "x": 1, "y": 2, "z": 3, "w": 4}]},
            {"name": "", "commands": []},
            {"name": "x", "commands": [], "extra": True},
            {"name": "x", "commands": [{"type": "move", "x": math.inf, "y": 0, "z": 0}]},
        ],
    )
    def test_rejects_off_schema(self, document):
        with pytest.raises(InterchangeError):
            program_from_dict(document)
