"""Element-descriptor file contract.

One JSON document per image decouples the analysis engine from whatever
extraction stage produced the elements.  Top-level keys: ``image_id``,
``width``, ``height``, ``half_features``, ``elements`` (plus optional
``source_path``).  Each element carries ``id``, ``kind``, ``bbox``
({x, y, w, h}), ``classes`` ([{label, score}]), ``features`` (layer name to
vector), optional ``features_mirrored`` (features of the horizontally
flipped crop, produced at extraction time), and for persons an optional
``pose`` ({joints: {name: {x, y, confidence}}, head: {yaw, pitch, roll}}).
Unknown extra keys are ignored for forward compatibility.

Loading is strict: a descriptor that loads successfully satisfies every
invariant checked by :func:`validate_descriptor`.  Loaded descriptors are
immutable, so loading distinct files in parallel is safe.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .geometry import Point2, Rect, Rotation3
from .joints import JOINT_NAMES

KINDS = ("patch", "object", "person")

MAX_CLASS_PREDICTIONS = 5


class DescriptorError(Exception):
    """Base class for descriptor loading failures."""


class ParseError(DescriptorError):
    """The file is not well-formed JSON."""


class SchemaError(DescriptorError):
    """A field is missing or has the wrong type."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


class ValidationError(DescriptorError):
    """A structurally well-formed descriptor violates an invariant."""

    def __init__(self, violations: list["Violation"]):
        first = violations[0]
        suffix = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
        super().__init__(f"{first}{suffix}")
        self.violations = violations


@dataclass(frozen=True)
class Violation:
    """One invariant violation; element_id is None for image-level rules."""

    element_id: str | None
    rule: str
    message: str

    def __str__(self) -> str:
        where = self.element_id if self.element_id is not None else "<image>"
        return f"{where}: [{self.rule}] {self.message}"


@dataclass(frozen=True)
class ClassPrediction:
    label: str
    score: float


@dataclass(frozen=True)
class Keypoint:
    point: Point2
    confidence: float


@dataclass(frozen=True)
class PoseDescriptor:
    joints: dict[str, Keypoint]
    head: Rotation3 | None = None


@dataclass(frozen=True)
class ElementDescriptor:
    """One detected image element: a patch, an object, or a person."""

    id: str
    kind: str
    bbox: Rect
    classes: tuple[ClassPrediction, ...] = ()
    features: dict[str, tuple[float, ...]] = field(default_factory=dict)
    features_mirrored: dict[str, tuple[float, ...]] | None = None
    pose: PoseDescriptor | None = None


@dataclass(frozen=True)
class HalfFeatures:
    """Per-layer features of the left image half and the mirrored right half."""

    left: tuple[float, ...]
    right_mirrored: tuple[float, ...]


@dataclass(frozen=True)
class ImageDescriptor:
    image_id: str
    width: float
    height: float
    elements: tuple[ElementDescriptor, ...] = ()
    half_features: dict[str, HalfFeatures] = field(default_factory=dict)
    source_path: str | None = None


# ---------------------------------------------------------------------------
# parsing


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    return obj[key]


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {type(value).__name__}")
    return value


def _as_dict(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    return value


def _as_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected an array, got {type(value).__name__}")
    return value


def _vector(value: Any, path: str) -> tuple[float, ...]:
    return tuple(_as_number(v, f"{path}[{i}]") for i, v in enumerate(_as_list(value, path)))


def _feature_map(value: Any, path: str) -> dict[str, tuple[float, ...]]:
    raw = _as_dict(value, path)
    return {_as_str(k, path): _vector(v, f"{path}.{k}") for k, v in raw.items()}


def _parse_bbox(raw: Any, path: str, element_id: str) -> Rect:
    obj = _as_dict(raw, path)
    vals = {k: _as_number(_require(obj, k, path), f"{path}.{k}") for k in ("x", "y", "w", "h")}
    # Rect refuses nonpositive extents; report that as a violation tied to the
    # element rather than a bare constructor error.
    if not all(math.isfinite(v) for v in vals.values()):
        raise ValidationError([Violation(element_id, "bbox_finite", f"{path} has non-finite values")])
    if vals["w"] <= 0 or vals["h"] <= 0:
        raise ValidationError(
            [Violation(element_id, "bbox_positive_extent",
                       f"bbox extent must be positive, got w={vals['w']}, h={vals['h']}")]
        )
    return Rect(vals["x"], vals["y"], vals["w"], vals["h"])


def _parse_pose(raw: Any, path: str) -> PoseDescriptor:
    obj = _as_dict(raw, path)
    joints: dict[str, Keypoint] = {}
    for name, jraw in _as_dict(obj.get("joints", {}), f"{path}.joints").items():
        jobj = _as_dict(jraw, f"{path}.joints.{name}")
        x = _as_number(_require(jobj, "x", f"{path}.joints.{name}"), f"{path}.joints.{name}.x")
        y = _as_number(_require(jobj, "y", f"{path}.joints.{name}"), f"{path}.joints.{name}.y")
        conf = _as_number(jobj.get("confidence", 1.0), f"{path}.joints.{name}.confidence")
        joints[name] = Keypoint(Point2(x, y), conf)
    head = None
    if obj.get("head") is not None:
        hobj = _as_dict(obj["head"], f"{path}.head")
        head = Rotation3(
            _as_number(_require(hobj, "yaw", f"{path}.head"), f"{path}.head.yaw"),
            _as_number(_require(hobj, "pitch", f"{path}.head"), f"{path}.head.pitch"),
            _as_number(_require(hobj, "roll", f"{path}.head"), f"{path}.head.roll"),
        )
    return PoseDescriptor(joints=joints, head=head)


def _parse_element(raw: Any, path: str) -> ElementDescriptor:
    obj = _as_dict(raw, path)
    element_id = _as_str(_require(obj, "id", path), f"{path}.id")
    kind = _as_str(_require(obj, "kind", path), f"{path}.kind")
    if kind not in KINDS:
        raise SchemaError(f"{path}.kind", f"unknown kind {kind!r}, expected one of {KINDS}")
    bbox = _parse_bbox(_require(obj, "bbox", path), f"{path}.bbox", element_id)
    classes = tuple(
        ClassPrediction(
            _as_str(_require(_as_dict(c, f"{path}.classes[{i}]"), "label", f"{path}.classes[{i}]"),
                    f"{path}.classes[{i}].label"),
            _as_number(_require(c, "score", f"{path}.classes[{i}]"), f"{path}.classes[{i}].score"),
        )
        for i, c in enumerate(_as_list(obj.get("classes", []), f"{path}.classes"))
    )
    features = _feature_map(obj.get("features", {}), f"{path}.features")
    mirrored = None
    if obj.get("features_mirrored") is not None:
        mirrored = _feature_map(obj["features_mirrored"], f"{path}.features_mirrored")
    pose = None
    if obj.get("pose") is not None:
        pose = _parse_pose(obj["pose"], f"{path}.pose")
    return ElementDescriptor(
        id=element_id, kind=kind, bbox=bbox, classes=classes,
        features=features, features_mirrored=mirrored, pose=pose,
    )


def descriptor_from_dict(raw: dict) -> ImageDescriptor:
    """Build a descriptor from parsed JSON; raises SchemaError / ValidationError."""
    obj = _as_dict(raw, "")
    width = _as_number(_require(obj, "width", ""), "width")
    height = _as_number(_require(obj, "height", ""), "height")
    if width <= 0 or height <= 0:
        raise ValidationError(
            [Violation(None, "image_size_positive", f"width/height must be positive, got {width}x{height}")]
        )
    half: dict[str, HalfFeatures] = {}
    for layer, hraw in _as_dict(obj.get("half_features", {}), "half_features").items():
        hobj = _as_dict(hraw, f"half_features.{layer}")
        half[layer] = HalfFeatures(
            left=_vector(_require(hobj, "left", f"half_features.{layer}"), f"half_features.{layer}.left"),
            right_mirrored=_vector(
                _require(hobj, "right_mirrored", f"half_features.{layer}"),
                f"half_features.{layer}.right_mirrored",
            ),
        )
    elements = tuple(
        _parse_element(e, f"elements[{i}]")
        for i, e in enumerate(_as_list(obj.get("elements", []), "elements"))
    )
    source = obj.get("source_path")
    if source is not None:
        source = _as_str(source, "source_path")
    return ImageDescriptor(
        image_id=_as_str(_require(obj, "image_id", ""), "image_id"),
        width=width, height=height, elements=elements,
        half_features=half, source_path=source,
    )


def load_descriptor(path: str | Path) -> ImageDescriptor:
    """Load and fully validate one descriptor file.

    Raises ParseError for malformed JSON, SchemaError for missing or
    mistyped fields, ValidationError when an invariant is violated.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    descriptor = descriptor_from_dict(raw)
    violations = validate_descriptor(descriptor)
    if violations:
        raise ValidationError(violations)
    return descriptor


# ---------------------------------------------------------------------------
# serialization


def element_to_dict(e: ElementDescriptor) -> dict:
    out: dict[str, Any] = {
        "id": e.id,
        "kind": e.kind,
        "bbox": {"x": e.bbox.x, "y": e.bbox.y, "w": e.bbox.w, "h": e.bbox.h},
        "classes": [{"label": c.label, "score": c.score} for c in e.classes],
        "features": {layer: list(vec) for layer, vec in e.features.items()},
    }
    if e.features_mirrored is not None:
        out["features_mirrored"] = {layer: list(vec) for layer, vec in e.features_mirrored.items()}
    if e.pose is not None:
        pose: dict[str, Any] = {
            "joints": {
                name: {"x": kp.point.x, "y": kp.point.y, "confidence": kp.confidence}
                for name, kp in e.pose.joints.items()
            }
        }
        if e.pose.head is not None:
            pose["head"] = {"yaw": e.pose.head.yaw, "pitch": e.pose.head.pitch, "roll": e.pose.head.roll}
        out["pose"] = pose
    return out


def descriptor_to_dict(d: ImageDescriptor) -> dict:
    out: dict[str, Any] = {
        "image_id": d.image_id,
        "width": d.width,
        "height": d.height,
        "half_features": {
            layer: {"left": list(h.left), "right_mirrored": list(h.right_mirrored)}
            for layer, h in d.half_features.items()
        },
        "elements": [element_to_dict(e) for e in d.elements],
    }
    if d.source_path is not None:
        out["source_path"] = d.source_path
    return out


def save_descriptor(d: ImageDescriptor, path: str | Path) -> None:
    """Write a descriptor as JSON; load(save(d)) reproduces d field for field."""
    Path(path).write_text(
        json.dumps(descriptor_to_dict(d), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# validation


def _element_violations(e: ElementDescriptor, d: ImageDescriptor) -> list[Violation]:
    out = []
    b = e.bbox
    if b.x < 0 or b.y < 0 or b.x + b.w > d.width or b.y + b.h > d.height:
        out.append(Violation(e.id, "bbox_in_bounds",
                             f"bbox ({b.x}, {b.y}, {b.w}, {b.h}) exceeds image {d.width}x{d.height}"))
    if len(e.classes) > MAX_CLASS_PREDICTIONS:
        out.append(Violation(e.id, "classes_max_5",
                             f"{len(e.classes)} class predictions, limit is {MAX_CLASS_PREDICTIONS}"))
    for c in e.classes:
        if not c.label:
            out.append(Violation(e.id, "class_label_nonempty", "empty class label"))
        if not 0.0 <= c.score <= 1.0:
            out.append(Violation(e.id, "class_score_range", f"score {c.score} outside [0, 1]"))
    scores = [c.score for c in e.classes]
    if scores != sorted(scores, reverse=True):
        out.append(Violation(e.id, "classes_sorted", "class predictions not sorted by descending score"))
    if e.pose is not None:
        if e.kind != "person":
            out.append(Violation(e.id, "pose_person_only", f"pose data on kind {e.kind!r}"))
        for name, kp in e.pose.joints.items():
            if name not in JOINT_NAMES:
                out.append(Violation(e.id, "joint_name_known", f"unknown joint name {name!r}"))
            if not 0.0 <= kp.confidence <= 1.0:
                out.append(Violation(e.id, "joint_confidence_range",
                                     f"joint {name!r} confidence {kp.confidence} outside [0, 1]"))
    return out


def validate_descriptor(d: ImageDescriptor) -> list[Violation]:
    """Check every descriptor invariant; an empty result means the descriptor is clean."""
    out: list[Violation] = []
    if d.width <= 0 or d.height <= 0:
        out.append(Violation(None, "image_size_positive",
                             f"width/height must be positive, got {d.width}x{d.height}"))
        return out

    seen: set[str] = set()
    for e in d.elements:
        if e.id in seen:
            out.append(Violation(e.id, "unique_element_ids", f"duplicate element id {e.id!r}"))
        seen.add(e.id)
        out.extend(_element_violations(e, d))

    # Feature vectors for one layer must agree in dimension across the image,
    # mirrored variants included.
    dims: dict[str, tuple[int, str]] = {}
    for e in d.elements:
        maps = [e.features] + ([e.features_mirrored] if e.features_mirrored is not None else [])
        for fmap in maps:
            for layer, vec in fmap.items():
                if layer not in dims:
                    dims[layer] = (len(vec), e.id)
                elif dims[layer][0] != len(vec):
                    out.append(Violation(
                        e.id, "feature_dim_consistent",
                        f"layer {layer!r} has dimension {len(vec)}, "
                        f"but element {dims[layer][1]!r} has {dims[layer][0]}",
                    ))

    for layer, h in d.half_features.items():
        if len(h.left) == 0 or len(h.left) != len(h.right_mirrored):
            out.append(Violation(None, "half_feature_dims",
                                 f"half features for layer {layer!r} must be nonempty and equal-length"))
    return out
