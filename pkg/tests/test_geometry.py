from __future__ import annotations

import random

import numpy as np
import pytest

from speared.geometry import Aabb, segment_aabb_contact


def dense_sample_hit(start, end, box: Aabb, step: float = 1e-3) -> bool:
    """Oracle: walk the segment at a fixed parametric step and test each point.

    Independent of the slab method; resolution-limited, so comparisons
    against it must allow a thin band around the box surface.
    """
    t = np.arange(0.0, 1.0 + step / 2, step)
    points = np.asarray(start)[None, :] + t[:, None] * (
        np.asarray(end) - np.asarray(start)
    )[None, :]
    (lo_x, hi_x), (lo_y, hi_y), (lo_z, hi_z) = box.bounds()
    inside = (
        (points[:, 0] >= lo_x)
        & (points[:, 0] <= hi_x)
        & (points[:, 1] >= lo_y)
        & (points[:, 1] <= hi_y)
        & (points[:, 2] >= lo_z)
        & (points[:, 2] <= hi_z)
    )
    return bool(inside.any())


def random_pair(rng: random.Random):
    box = Aabb(
        center=tuple(rng.uniform(-150, 150) for _ in range(3)),
        size=tuple(rng.uniform(5, 120) for _ in range(3)),
    )
    start = tuple(rng.uniform(-250, 250) for _ in range(3))
    end = tuple(rng.uniform(-250, 250) for _ in range(3))
    return start, end, box


class TestSegmentAabbContact:
    def test_axis_aligned_entry_face(self):
        box = Aabb((0.0, 0.0, 25.0), (50.0, 50.0, 50.0))
        contact = segment_aabb_contact((0, 0, 200), (0, 0, 0), box)
        assert contact == (0.0, 0.0, 50.0)

    def test_fully_outside(self):
        box = Aabb((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
        assert segment_aabb_contact((20, 20, 20), (30, 30, 30), box) is None

    def test_start_inside_returns_start(self):
        box = Aabb((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
        assert segment_aabb_contact((1, 2, 3), (40, 40, 40), box) == (1.0, 2.0, 3.0)

    def test_degenerate_segment_inside(self):
        box = Aabb((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
        assert segment_aabb_contact((1, 1, 1), (1, 1, 1), box) == (1.0, 1.0, 1.0)

    def test_degenerate_segment_outside(self):
        box = Aabb((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
        assert segment_aabb_contact((9, 0, 0), (9, 0, 0), box) is None

    def test_parallel_slab_miss(self):
        box = Aabb((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
        assert segment_aabb_contact((20, -50, 0), (20, 50, 0), box) is None

    def test_corner_graze(self):
        box = Aabb((0.0, 0.0, 0.0), (2.0, 2.0, 2.0))
        contact = segment_aabb_contact((-2, 0, 1), (0, -2, 1), box)
        assert contact == pytest.approx((-1.0, -1.0, 1.0))

    def test_contact_lies_on_segment_and_box(self):
        rng = random.Random(41)
        hits = 0
        for _ in range(2000):
            start, end, box = random_pair(rng)
            contact = segment_aabb_contact(start, end, box)
            if contact is None:
                continue
            hits += 1
            grown = box.inflated(1e-9)
            assert grown.contains(contact)
            # Contact is on the segment: collinear within tolerance.
            s, e, c = map(np.asarray, (start, end, contact))
            d = e - s
            t = float(np.dot(c - s, d) / np.dot(d, d)) if np.dot(d, d) else 0.0
            assert -1e-9 <= t <= 1.0 + 1e-9
            assert np.linalg.norm(s + t * d - c) < 1e-6
        assert hits > 100

    def test_against_dense_sampling_oracle(self):
        # Disagreement is allowed only within a 1e-2 mm band of the surface:
        # a slab hit that a shrunken box misses, or a sampled hit whose
        # points all sit within the band of an inflated-box miss.
        rng = random.Random(20260809)
        disagreements = 0
        for _ in range(2000):
            start, end, box = random_pair(rng)
            slab = segment_aabb_contact(start, end, box) is not None
            sampled = dense_sample_hit(start, end, box)
            if slab == sampled:
                continue
            disagreements += 1
            if slab and not sampled:
                assert segment_aabb_contact(start, end, box.inflated(-1e-2)) is None
            else:
                assert segment_aabb_contact(start, end, box.inflated(1e-2)) is not None
        assert disagreements < 50
