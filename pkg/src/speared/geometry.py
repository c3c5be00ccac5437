"""Segment / axis-aligned-box intersection via the slab method.

The swept suction tip between two simulation substeps is treated as a
straight segment; scene objects are axis-aligned boxes. The slab method
clips the segment's parametric interval [0, 1] against the three axis
slabs; a non-empty remainder means contact, and the interval entry gives
the contact point (the segment start when it begins inside the box).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box given by its center and full side lengths (mm)."""

    center: tuple[float, float, float]
    size: tuple[float, float, float]

    def bounds(self) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        return tuple(
            (c - s / 2.0, c + s / 2.0) for c, s in zip(self.center, self.size)
        )  # type: ignore[return-value]

    def contains(self, point: tuple[float, float, float]) -> bool:
        return all(lo <= p <= hi for p, (lo, hi) in zip(point, self.bounds()))

    def inflated(self, margin: float) -> "Aabb":
        return Aabb(self.center, tuple(max(0.0, s + 2.0 * margin) for s in self.size))


def segment_aabb_contact(
    start: tuple[float, float, float],
    end: tuple[float, float, float],
    box: Aabb,
) -> tuple[float, float, float] | None:
    """Return the contact point where the segment first touches the box, or None.

    Endpoints and faces count as contact (closed intervals); callers that
    need a tolerance band inflate or deflate the box instead.
    """
    t_min, t_max = 0.0, 1.0
    for p0, p1, (lo, hi) in zip(start, end, box.bounds()):
        d = p1 - p0
        if d == 0.0:
            if p0 < lo or p0 > hi:
                return None
            continue
        t1 = (lo - p0) / d
        t2 = (hi - p0) / d
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > t_min:
            t_min = t1
        if t2 < t_max:
            t_max = t2
        if t_min > t_max:
            return None
    t = max(0.0, t_min)
    return (
        start[0] + (end[0] - start[0]) * t,
        start[1] + (end[1] - start[1]) * t,
        start[2] + (end[2] - start[2]) * t,
    )
