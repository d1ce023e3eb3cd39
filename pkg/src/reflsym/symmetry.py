"""Reflectional-symmetry rules: centered elements, symmetry pairs, body pose.

An element whose center sits inside the on-axis band is symmetric by
itself; elements on opposite sides form candidate pairs whose deviation
from perfect reflection is scored as a divergence record with position,
size, aspect-ratio and (for persons) pose components, each normalized to
be dimensionless before averaging.  Classification applies a single
threshold to the component mean.

Pose symmetry follows the skeleton conventions in joints.py.  Joint
placement divergences are normalized by torso scale, the neck-to-mid-hip
distance, so the checks are invariant to person size in the image.  Facing
direction is symmetric when pitch matches and yaw and roll are opposite.

All functions are pure; analyses of different images can run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import fmean

from .config import SymmetryConfig
from .descriptors import ElementDescriptor, PoseDescriptor
from .geometry import LEFT, ON, RIGHT, Rect, Rotation3, SymmetryAxis, center, orientation, rel_pos, wrap_degrees
from .joints import FACING_DIRECTION, lateral_twin, part_of

# A facing-direction deviation of this many degrees counts as divergence 1.0,
# putting head angles on the same scale as the positional components.
FACING_ANGLE_SCALE_DEG = 90.0

# Joint offsets engineered to land exactly on the threshold can round a hair
# below it; means within this margin of the threshold count as at it.
PART_BOUNDARY_EPS = 1e-12


class SymmetryError(Exception):
    pass


class SideError(SymmetryError):
    """Pair operands are not on opposite sides of the axis."""


class MissingJointsError(SymmetryError):
    """Pose data lacks every joint pairing the check needs."""


@dataclass(frozen=True)
class DivergenceRecord:
    """Per-aspect deviation from perfect reflection; components are
    normalized and absent ones (None) are excluded from the mean."""

    position: float
    size: float | None = None
    aspect_ratio: float | None = None
    pose: float | None = None
    mean: float = 0.0


def divergence_record(
    position: float,
    size: float | None = None,
    aspect_ratio: float | None = None,
    pose: float | None = None,
) -> DivergenceRecord:
    present = [position] + [v for v in (size, aspect_ratio, pose) if v is not None]
    return DivergenceRecord(position, size, aspect_ratio, pose, fmean(present))


@dataclass(frozen=True)
class SymmetryPair:
    left_id: str
    right_id: str
    divergence: DivergenceRecord
    perceptual_similarity: float | None = None
    semantic_similarity: float | None = None
    unmirrored: bool = False


@dataclass(frozen=True)
class CenteredElement:
    element_id: str
    divergence: DivergenceRecord


@dataclass(frozen=True)
class PoseSymmetryReport:
    """Part-level symmetry of one person or one person pair.

    subject holds one element id (self symmetry) or two (pair symmetry).
    per_joint_divergence is keyed by the compared joint pairing; skipped
    lists pairings dropped because a joint was absent.
    """

    subject: tuple[str, ...]
    symmetric_parts: tuple[str, ...]
    asymmetric_parts: tuple[str, ...]
    per_joint_divergence: dict[tuple[str, str], float] = field(default_factory=dict)
    facing_symmetric: bool | None = None
    skipped_pairs: tuple[tuple[str, str], ...] = ()


# ---------------------------------------------------------------------------
# facing direction


def facing_symmetry(h1: Rotation3, h2: Rotation3, tol_deg: float) -> tuple[bool, float]:
    """Check mirror symmetry of two head rotations.

    Mirrored heads have equal pitch and opposite yaw and roll; divergence is
    the mean angular deviation from that in degrees.  Each term is wrapped
    so that, e.g., yaws of 179 and -179 degrees read as nearly opposite.
    """
    if tol_deg < 0:
        raise ValueError(f"tol_deg must be nonnegative, got {tol_deg}")
    # abs before wrapping keeps the result exactly symmetric in (h1, h2)
    divergence = (
        abs(wrap_degrees(abs(h1.pitch - h2.pitch)))
        + abs(wrap_degrees(h1.yaw + h2.yaw))
        + abs(wrap_degrees(h1.roll + h2.roll))
    ) / 3.0
    return divergence <= tol_deg, divergence


def _facing_tolerance(cfg: SymmetryConfig) -> float:
    return cfg.divergence_threshold * FACING_ANGLE_SCALE_DEG


# ---------------------------------------------------------------------------
# element-level rules


def check_centered(
    e: ElementDescriptor, axis: SymmetryAxis, cfg: SymmetryConfig
) -> CenteredElement | None:
    """Return a centered-element record iff the element sits on the axis."""
    eps = cfg.on_eps_fraction * axis.image_width
    if orientation(e.bbox, axis, eps) != ON:
        return None
    offset = abs(rel_pos(e.bbox, axis).axis_distance) / axis.image_width
    return CenteredElement(element_id=e.id, divergence=divergence_record(offset))


def pair_divergence(
    e_i: ElementDescriptor, e_j: ElementDescriptor, axis: SymmetryAxis, eps: float = 0.0
) -> DivergenceRecord:
    """Divergence of a candidate pair from perfect reflection.

    e_i must lie left of the axis and e_j right of it.  The position
    component sums the signed axis distances (which cancel for mirrored
    centers) with the vertical offset; size and aspect-ratio compare
    extents relative to the larger operand.  When both elements are
    persons with usable poses a pose component, the mean per-joint
    placement divergence, joins the average.
    """
    if orientation(e_i.bbox, axis, eps) != LEFT:
        raise SideError(f"element {e_i.id!r} is not left of the axis")
    if orientation(e_j.bbox, axis, eps) != RIGHT:
        raise SideError(f"element {e_j.id!r} is not right of the axis")
    ri = rel_pos(e_i.bbox, axis)
    rj = rel_pos(e_j.bbox, axis)
    position = (
        abs(ri.axis_distance + rj.axis_distance) / axis.image_width
        + abs(ri.y - rj.y) / axis.image_height
    ) / 2.0
    size = (
        abs(e_i.bbox.w - e_j.bbox.w) / max(e_i.bbox.w, e_j.bbox.w)
        + abs(e_i.bbox.h - e_j.bbox.h) / max(e_i.bbox.h, e_j.bbox.h)
    ) / 2.0
    a_i = e_i.bbox.aspect_ratio
    a_j = e_j.bbox.aspect_ratio
    aspect = abs(a_i - a_j) / max(a_i, a_j)
    pose = None
    if e_i.kind == "person" and e_j.kind == "person" and e_i.pose and e_j.pose:
        try:
            divs, _ = _pair_joint_divergences(e_i.pose, e_j.pose, axis, e_i.bbox, e_j.bbox)
        except MissingJointsError:
            divs = {}
        if divs:
            pose = fmean(divs.values())
    return divergence_record(position, size, aspect, pose)


def propose_pairs(
    elements: list[ElementDescriptor], axis: SymmetryAxis, cfg: SymmetryConfig
) -> tuple[list[SymmetryPair], list[CenteredElement], list[str]]:
    """Partition elements into symmetry pairs, centered singles, and leftovers.

    Candidate pairs span the axis, share a kind, and diverge by at most
    twice the classification threshold; they are accepted greedily in
    order of ascending mean divergence (ties broken by id), so the result
    is deterministic for a fixed input.  Similarities are left unset.
    """
    eps = cfg.on_eps_fraction * axis.image_width
    singles: list[CenteredElement] = []
    lefts: list[ElementDescriptor] = []
    rights: list[ElementDescriptor] = []
    for e in elements:
        side = orientation(e.bbox, axis, eps)
        if side == ON:
            centered = check_centered(e, axis, cfg)
            assert centered is not None
            singles.append(centered)
        elif side == LEFT:
            lefts.append(e)
        else:
            rights.append(e)

    candidates = []
    for li in lefts:
        for rj in rights:
            if li.kind != rj.kind:
                continue
            record = pair_divergence(li, rj, axis, eps)
            if record.mean <= 2.0 * cfg.divergence_threshold:
                candidates.append((record.mean, li.id, rj.id, record))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))

    taken: set[str] = set()
    pairs: list[SymmetryPair] = []
    for mean, left_id, right_id, record in candidates:
        if left_id in taken or right_id in taken:
            continue
        taken.add(left_id)
        taken.add(right_id)
        pairs.append(SymmetryPair(left_id=left_id, right_id=right_id, divergence=record))

    matched_or_on = taken | {s.element_id for s in singles}
    unmatched = [e.id for e in elements if e.id not in matched_or_on]
    return pairs, singles, unmatched


def classify_structure(
    pairs: list[SymmetryPair], singles: list[CenteredElement], cfg: SymmetryConfig
) -> tuple[tuple[tuple[str, ...], ...], tuple[tuple[str, ...], ...]]:
    """Split pairs and singles into symmetric and non-symmetric hypotheses.

    A subject is symmetric iff its mean divergence is at or below the
    threshold and, where a perceptual similarity was computed, that
    similarity reaches the similarity threshold.  Returns (symmetric,
    non_symmetric) as tuples of id tuples; together they cover every input
    exactly once.
    """
    symmetric: list[tuple[str, ...]] = []
    non_symmetric: list[tuple[str, ...]] = []
    for p in pairs:
        ok = p.divergence.mean <= cfg.divergence_threshold and (
            p.perceptual_similarity is None
            or p.perceptual_similarity >= cfg.similarity_threshold
        )
        (symmetric if ok else non_symmetric).append((p.left_id, p.right_id))
    for s in singles:
        ok = s.divergence.mean <= cfg.divergence_threshold
        (symmetric if ok else non_symmetric).append((s.element_id,))
    return tuple(symmetric), tuple(non_symmetric)


# ---------------------------------------------------------------------------
# body pose


def _torso_scale(p: PoseDescriptor, bbox: Rect | None) -> float | None:
    neck = p.joints.get("neck")
    lhip = p.joints.get("left_hip")
    rhip = p.joints.get("right_hip")
    if neck and lhip and rhip:
        mid_hip_x = (lhip.point.x + rhip.point.x) / 2.0
        mid_hip_y = (lhip.point.y + rhip.point.y) / 2.0
        scale = math.hypot(neck.point.x - mid_hip_x, neck.point.y - mid_hip_y)
        if scale > 0.0:
            return scale
    if bbox is not None:
        return bbox.h
    return None


def _person_center(p: PoseDescriptor, bbox: Rect | None) -> tuple[float, float] | None:
    neck = p.joints.get("neck")
    if neck:
        return neck.point.x, neck.point.y
    if bbox is not None:
        c = center(bbox)
        return c.x, c.y
    return None


def _classify_parts(
    divergences: dict[tuple[str, str], float], part_key_joint: int, cfg: SymmetryConfig
) -> tuple[list[str], list[str]]:
    by_part: dict[str, list[float]] = {}
    for key, value in divergences.items():
        part = part_of(key[part_key_joint])
        if part is not None:
            by_part.setdefault(part, []).append(value)
    symmetric, asymmetric = [], []
    for part in sorted(by_part):
        # Strictly below threshold: a part sitting exactly at the limit is
        # already a visible deviation.
        if fmean(by_part[part]) < cfg.divergence_threshold - PART_BOUNDARY_EPS:
            symmetric.append(part)
        else:
            asymmetric.append(part)
    return symmetric, asymmetric


def pose_self_symmetry(
    p: PoseDescriptor,
    cfg: SymmetryConfig,
    bbox: Rect | None = None,
    subject: tuple[str, ...] = (),
) -> PoseSymmetryReport:
    """Left-right symmetry of a single body pose about the person's center.

    For each configured joint pair the horizontal offsets from the person
    center should cancel and the heights should match; the residual,
    normalized by torso scale, is the pair's divergence.  The person
    center is the neck, or the bounding-box center when the neck is
    missing and a bbox was supplied.
    """
    scale = _torso_scale(p, bbox)
    center_p = _person_center(p, bbox)
    divergences: dict[tuple[str, str], float] = {}
    skipped: list[tuple[str, str]] = []
    for pair in cfg.joint_pairs:
        jk = p.joints.get(pair[0])
        jl = p.joints.get(pair[1])
        if jk is None or jl is None or scale is None or center_p is None:
            skipped.append(pair)
            continue
        cx = center_p[0]
        divergences[pair] = (
            abs((jk.point.x - cx) + (jl.point.x - cx)) + abs(jk.point.y - jl.point.y)
        ) / scale
    if not divergences:
        raise MissingJointsError("no configured joint pair is complete")
    symmetric, asymmetric = _classify_parts(divergences, 0, cfg)
    facing: bool | None = None
    if p.head is not None:
        facing, _ = facing_symmetry(p.head, p.head, _facing_tolerance(cfg))
        (symmetric if facing else asymmetric).append(FACING_DIRECTION)
    return PoseSymmetryReport(
        subject=subject,
        symmetric_parts=tuple(symmetric),
        asymmetric_parts=tuple(asymmetric),
        per_joint_divergence=divergences,
        facing_symmetric=facing,
        skipped_pairs=tuple(skipped),
    )


def _pair_joint_divergences(
    p1: PoseDescriptor,
    p2: PoseDescriptor,
    axis: SymmetryAxis,
    bbox1: Rect | None,
    bbox2: Rect | None,
) -> tuple[dict[tuple[str, str], float], tuple[tuple[str, str], ...]]:
    """Associate each p1 joint with its laterally swapped p2 joint and score
    how far each association deviates from exact reflection about the axis."""
    scales = [s for s in (_torso_scale(p1, bbox1), _torso_scale(p2, bbox2)) if s is not None]
    if not scales:
        raise MissingJointsError("torso scale unavailable for both poses")
    scale = fmean(scales)
    divergences: dict[tuple[str, str], float] = {}
    skipped: list[tuple[str, str]] = []
    for name in sorted(p1.joints):
        twin = lateral_twin(name)
        other = p2.joints.get(twin)
        if other is None:
            skipped.append((name, twin))
            continue
        d1 = p1.joints[name].point.x - axis.x
        d2 = other.point.x - axis.x
        divergences[(name, twin)] = (
            abs(d1 + d2) + abs(p1.joints[name].point.y - other.point.y)
        ) / scale
    if not divergences:
        raise MissingJointsError("no joint of the first pose has a partner in the second")
    return divergences, tuple(skipped)


def pose_pair_symmetry(
    p1: PoseDescriptor,
    p2: PoseDescriptor,
    axis: SymmetryAxis,
    cfg: SymmetryConfig,
    bbox1: Rect | None = None,
    bbox2: Rect | None = None,
    subject: tuple[str, ...] = (),
) -> PoseSymmetryReport:
    """Mirror symmetry between two persons' poses across the image axis.

    Joints swap sides under reflection, so each p1 joint is compared to
    its lateral twin in p2 (nose and neck to themselves).  A joint lands
    where its partner reflects to when the signed axis distances cancel
    and heights agree; residuals are normalized by the mean torso scale.
    """
    divergences, skipped = _pair_joint_divergences(p1, p2, axis, bbox1, bbox2)
    symmetric, asymmetric = _classify_parts(divergences, 0, cfg)
    facing: bool | None = None
    if p1.head is not None and p2.head is not None:
        facing, _ = facing_symmetry(p1.head, p2.head, _facing_tolerance(cfg))
        (symmetric if facing else asymmetric).append(FACING_DIRECTION)
    return PoseSymmetryReport(
        subject=subject,
        symmetric_parts=tuple(symmetric),
        asymmetric_parts=tuple(asymmetric),
        per_joint_divergence=divergences,
        facing_symmetric=facing,
        skipped_pairs=tuple(skipped),
    )
