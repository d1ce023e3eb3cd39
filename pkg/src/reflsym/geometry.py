"""Spatial primitives for reflectional symmetry analysis.

Pixel coordinate frame: x grows rightward, y grows downward, origin at the
top-left image corner.  The symmetry axis is always a vertical line.  All
types here are immutable values; every operation is a pure function, so the
module is safe to use from any number of concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

Side = Literal["left", "right", "on"]

LEFT: Side = "left"
RIGHT: Side = "right"
ON: Side = "on"


def wrap_degrees(angle: float) -> float:
    """Map an angle in degrees onto [-180, 180)."""
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle}")
    # +0.0 folds -0.0 into 0.0 so wrapped angles compare cleanly
    return (angle + 180.0) % 360.0 - 180.0 + 0.0


@dataclass(frozen=True)
class Point2:
    """A point in pixel coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: top-left corner plus positive extent, in pixels."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "w", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"rect field {name} must be finite")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"rect extent must be positive, got w={self.w}, h={self.h}")

    @property
    def aspect_ratio(self) -> float:
        """Width divided by height."""
        return self.w / self.h


@dataclass(frozen=True)
class Rotation3:
    """Yaw/pitch/roll in degrees, each normalized to [-180, 180).

    Angles are measured relative to a front-facing reference orientation;
    the constructor normalizes, so callers may pass any finite angle.
    """

    yaw: float
    pitch: float
    roll: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "yaw", wrap_degrees(self.yaw))
        object.__setattr__(self, "pitch", wrap_degrees(self.pitch))
        object.__setattr__(self, "roll", wrap_degrees(self.roll))


@dataclass(frozen=True)
class SymmetryAxis:
    """A vertical reflection axis at x, inside an image of the given size."""

    x: float
    image_width: float
    image_height: float

    def __post_init__(self) -> None:
        if self.image_width <= 0 or self.image_height <= 0:
            raise ValueError("image dimensions must be positive")
        if not 0 < self.x < self.image_width:
            raise ValueError(
                f"axis x={self.x} must lie strictly inside the image (width {self.image_width})"
            )


@dataclass(frozen=True)
class RelPos:
    """Position of an element relative to the axis: signed horizontal distance
    (negative = left of the axis) and the plain y coordinate."""

    axis_distance: float
    y: float


def center(r: Rect) -> Point2:
    """Centre point of a rectangle."""
    return Point2(r.x + r.w / 2.0, r.y + r.h / 2.0)


def mirror_point(p: Point2, axis: SymmetryAxis) -> Point2:
    """Reflect a point about the vertical axis."""
    return Point2(2.0 * axis.x - p.x, p.y)


def mirror_rect(r: Rect, axis: SymmetryAxis) -> Rect:
    """Reflect a rectangle about the vertical axis.

    Width, height and y are preserved; the centre x lands at 2*axis.x - cx.
    The operation is an involution up to floating round-off.
    """
    return Rect(2.0 * axis.x - r.x - r.w, r.y, r.w, r.h)


def rel_pos(r: Rect, axis: SymmetryAxis) -> RelPos:
    """Relative position of a rectangle's centre with respect to the axis."""
    c = center(r)
    return RelPos(c.x - axis.x, c.y)


def distance(p: Point2, q: Point2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def orientation(r: Rect, axis: SymmetryAxis, eps: float) -> Side:
    """Classify a rectangle as left of, right of, or on the axis.

    eps is the on-axis tolerance in pixels; centres within eps of the axis
    count as on it.
    """
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    d = rel_pos(r, axis).axis_distance
    if abs(d) <= eps:
        return ON
    return LEFT if d < -eps else RIGHT
