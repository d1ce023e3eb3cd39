"""The 18-joint body skeleton: names, lateral twins, and part groups."""

from __future__ import annotations

UNPAIRED_JOINTS = ("nose", "neck")

# (left, right) twins; lateral swap maps one onto the other.
LATERAL_PAIRS: tuple[tuple[str, str], ...] = (
    ("left_eye", "right_eye"),
    ("left_ear", "right_ear"),
    ("left_shoulder", "right_shoulder"),
    ("left_elbow", "right_elbow"),
    ("left_wrist", "right_wrist"),
    ("left_hip", "right_hip"),
    ("left_knee", "right_knee"),
    ("left_ankle", "right_ankle"),
)

JOINT_NAMES = frozenset(UNPAIRED_JOINTS) | frozenset(n for pair in LATERAL_PAIRS for n in pair)

_TWIN = {l: r for l, r in LATERAL_PAIRS} | {r: l for l, r in LATERAL_PAIRS}

# Limb pairs compared by default when analysing pose symmetry.
DEFAULT_JOINT_PAIRS: tuple[tuple[str, str], ...] = (
    ("left_shoulder", "right_shoulder"),
    ("left_elbow", "right_elbow"),
    ("left_wrist", "right_wrist"),
    ("left_hip", "right_hip"),
    ("left_knee", "right_knee"),
    ("left_ankle", "right_ankle"),
)

UPPER_BODY = "upper_body"
LEGS = "legs"
FACING_DIRECTION = "facing_direction"

PART_NAMES = (UPPER_BODY, LEGS, FACING_DIRECTION)

_UPPER_BODY_FAMILIES = ("shoulder", "elbow", "wrist")
_LEG_FAMILIES = ("hip", "knee", "ankle")


def lateral_twin(name: str) -> str:
    """The laterally swapped joint name; unpaired joints map to themselves."""
    return _TWIN.get(name, name)


def part_of(joint_name: str) -> str | None:
    """Body part a joint contributes to, or None for head/torso joints."""
    for family in _UPPER_BODY_FAMILIES:
        if joint_name.endswith(family):
            return UPPER_BODY
    for family in _LEG_FAMILIES:
        if joint_name.endswith(family):
            return LEGS
    return None
