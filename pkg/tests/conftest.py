from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from speared import DEFAULT_PROFILE, Move, Program, Suction, load_scene_file, parse_program

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_DIR = REPO_ROOT / "demo"
FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def profile():
    return DEFAULT_PROFILE


@pytest.fixture
def yellow_cube_scene():
    return load_scene_file(DEMO_DIR / "yellow_cube_scene.json")


@pytest.fixture
def obstacle_scene():
    return load_scene_file(DEMO_DIR / "obstacle_scene.json")


@pytest.fixture
def pick_place_program():
    return parse_program((DEMO_DIR / "pick_place.rbt").read_text(), name="pick_place")


@pytest.fixture
def collision_program():
    return parse_program((DEMO_DIR / "collision_demo.rbt").read_text(), name="collision_demo")


def random_program(rng: random.Random, *, quantized: bool = True, max_len: int = 12) -> Program:
    """Random program; coordinates on the 1e-3 mm grid unless told otherwise."""
    commands = []
    for _ in range(rng.randint(0, max_len)):
        if rng.random() < 0.6:
            coords = [rng.uniform(-400.0, 400.0) for _ in range(3)]
            if quantized:
                coords = [round(c, 3) for c in coords]
            commands.append(Move(*coords))
        else:
            commands.append(Suction(rng.random() < 0.5))
    name = "".join(rng.choice("abcdefgh_-123") for _ in range(rng.randint(1, 12)))
    return Program(tuple(commands), name)


def load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))
