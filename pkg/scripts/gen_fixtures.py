#!/usr/bin/env python3
"""Regenerate the checked-in descriptor fixtures under tests/fixtures/.

Scenes are constructed, not captured: every bbox and joint is placed so
the expected analysis results can be derived by hand in the tests.  The
script is deterministic; rerunning it reproduces identical files.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from reflsym.descriptors import (
    ClassPrediction,
    ElementDescriptor,
    HalfFeatures,
    ImageDescriptor,
    Keypoint,
    PoseDescriptor,
    save_descriptor,
)
from reflsym.geometry import Point2, Rect, Rotation3

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

LAYERS = ("conv1", "conv2", "conv3", "conv4", "conv5")


def vec(rng: random.Random, dim: int = 8) -> tuple[float, ...]:
    return tuple(round(rng.uniform(-1.0, 1.0), 4) for _ in range(dim))


def half_features(rng: random.Random) -> dict[str, HalfFeatures]:
    out = {}
    for layer in LAYERS:
        v = vec(rng)
        out[layer] = HalfFeatures(left=v, right_mirrored=v)
    return out


def mirror_x(x: float, width: float) -> float:
    return width - x


def patch(eid: str, bbox: Rect, features: tuple[float, ...],
          mirrored: tuple[float, ...] | None = None) -> ElementDescriptor:
    return ElementDescriptor(
        id=eid,
        kind="patch",
        bbox=bbox,
        classes=(ClassPrediction("patch", 0.9),),
        features={"conv5": features},
        features_mirrored=None if mirrored is None else {"conv5": mirrored},
    )


def perfect_scene() -> ImageDescriptor:
    rng = random.Random(41)
    w, width = 60.0, 400.0
    fa = vec(rng)
    fb = vec(rng)
    elements = [
        # Two mirrored patch pairs; the right member carries the left member's
        # features as its mirrored-crop features, so perceptual similarity is 1.
        patch("pa_l", Rect(40.0, 50.0, w, 40.0), fa),
        patch("pa_r", Rect(width - 40.0 - w, 50.0, w, 40.0), vec(rng), mirrored=fa),
        patch("pb_l", Rect(80.0, 160.0, 50.0, 50.0), fb),
        patch("pb_r", Rect(width - 80.0 - 50.0, 160.0, 50.0, 50.0), vec(rng), mirrored=fb),
        ElementDescriptor(
            id="vase_c",
            kind="object",
            bbox=Rect(180.0, 120.0, 40.0, 60.0),
            classes=(ClassPrediction("vase", 0.8), ClassPrediction("bottle", 0.15)),
            features={"conv5": vec(rng)},
        ),
    ]
    return ImageDescriptor(
        image_id="perfect_scene",
        width=width,
        height=300.0,
        elements=tuple(elements),
        half_features=half_features(rng),
    )


def uneven_scene() -> ImageDescriptor:
    rng = random.Random(43)
    width = 400.0
    fl1, fl2, fl3 = vec(rng), vec(rng), vec(rng)
    elements = [
        patch("pl1", Rect(40.0, 40.0, 60.0, 40.0), fl1),
        patch("pl2", Rect(60.0, 120.0, 50.0, 50.0), fl2),
        patch("pl3", Rect(30.0, 210.0, 70.0, 30.0), fl3),
        # pr1 mirrors pl1 with a 6px horizontal offset, pr2 mirrors pl2 with a
        # 4px vertical offset; pl3 has no plausible partner.
        patch("pr1", Rect(width - 40.0 - 60.0 + 6.0, 40.0, 60.0, 40.0), vec(rng), mirrored=fl1),
        patch("pr2", Rect(width - 60.0 - 50.0, 124.0, 50.0, 50.0), vec(rng), mirrored=fl2),
    ]
    return ImageDescriptor(
        image_id="uneven_scene",
        width=width,
        height=300.0,
        elements=tuple(elements),
        half_features=half_features(rng),
    )


def _t_pose(cx: float, top: float, mirror_about: float | None = None) -> dict[str, Keypoint]:
    """Skeleton of an upright figure with arms out; cx is the body midline."""
    joints = {
        "nose": (cx, top),
        "neck": (cx, top + 20.0),
        "left_eye": (cx - 5.0, top - 4.0),
        "right_eye": (cx + 5.0, top - 4.0),
        "left_ear": (cx - 10.0, top),
        "right_ear": (cx + 10.0, top),
        "left_shoulder": (cx - 20.0, top + 25.0),
        "right_shoulder": (cx + 20.0, top + 25.0),
        "left_elbow": (cx - 45.0, top + 25.0),
        "right_elbow": (cx + 45.0, top + 25.0),
        "left_wrist": (cx - 70.0, top + 25.0),
        "right_wrist": (cx + 70.0, top + 25.0),
        "left_hip": (cx - 15.0, top + 120.0),
        "right_hip": (cx + 15.0, top + 120.0),
        "left_knee": (cx - 20.0, top + 180.0),
        "right_knee": (cx + 20.0, top + 180.0),
        "left_ankle": (cx - 20.0, top + 235.0),
        "right_ankle": (cx + 20.0, top + 235.0),
    }
    if mirror_about is not None:
        flipped = {}
        for name, (x, y) in joints.items():
            if name.startswith("left_"):
                twin = "right_" + name[5:]
            elif name.startswith("right_"):
                twin = "left_" + name[6:]
            else:
                twin = name
            flipped[twin] = (2.0 * mirror_about - x, y)
        joints = flipped
    return {name: Keypoint(Point2(x, y), 1.0) for name, (x, y) in joints.items()}


def people_scene() -> ImageDescriptor:
    rng = random.Random(47)
    width, height = 600.0, 400.0
    axis = width / 2.0

    left_joints = _t_pose(140.0, 100.0)
    right_joints = _t_pose(140.0, 100.0, mirror_about=axis)
    # Drop both of the right person's knees 30px: torso scale is 100, so the
    # knee associations diverge by exactly 0.3 and the legs part lands right
    # on the default threshold.
    for name in ("left_knee", "right_knee"):
        kp = right_joints[name]
        right_joints[name] = Keypoint(Point2(kp.point.x, kp.point.y + 30.0), 1.0)

    fp = vec(rng)
    person_left = ElementDescriptor(
        id="person_l",
        kind="person",
        bbox=Rect(70.0, 80.0, 140.0, 260.0),
        classes=(ClassPrediction("person", 0.95),),
        features={"conv5": fp},
        pose=PoseDescriptor(joints=left_joints, head=Rotation3(25.0, 0.0, 0.0)),
    )
    person_right = ElementDescriptor(
        id="person_r",
        kind="person",
        bbox=Rect(width - 70.0 - 140.0, 80.0, 140.0, 260.0),
        classes=(ClassPrediction("person", 0.95),),
        features={"conv5": vec(rng)},
        features_mirrored={"conv5": fp},
        # Same yaw as person_l: both look the same way, which reflection
        # would reverse, so their facing direction is not symmetric.
        pose=PoseDescriptor(joints=right_joints, head=Rotation3(25.0, 0.0, 0.0)),
    )
    bench = ElementDescriptor(
        id="bench_c",
        kind="object",
        bbox=Rect(200.0, 240.0, 200.0, 80.0),
        classes=(ClassPrediction("bench", 0.7), ClassPrediction("chair", 0.2)),
        features={"conv5": vec(rng)},
    )
    loner = ElementDescriptor(
        id="person_loner",
        kind="person",
        bbox=Rect(10.0, 150.0, 60.0, 180.0),
        classes=(ClassPrediction("person", 0.9),),
        features={"conv5": vec(rng)},
    )
    return ImageDescriptor(
        image_id="people_scene",
        width=width,
        height=height,
        elements=(person_left, person_right, bench, loner),
        half_features=half_features(rng),
    )


def empty_scene() -> ImageDescriptor:
    rng = random.Random(53)
    return ImageDescriptor(
        image_id="empty_scene",
        width=320.0,
        height=240.0,
        elements=(),
        half_features=half_features(rng),
    )


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    scenes = {
        "perfect_scene.json": perfect_scene(),
        "uneven_scene.json": uneven_scene(),
        "people_scene.json": people_scene(),
        "empty_scene.json": empty_scene(),
    }
    for name, descriptor in scenes.items():
        save_descriptor(descriptor, FIXTURES / name)
        print(f"wrote {FIXTURES / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
