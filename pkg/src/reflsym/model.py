"""Per-image interpretation model and its accessors.

build_model ties the pipeline together: it places the symmetry axis,
proposes pairs and centered singles, attaches perceptual and semantic
similarity to every pair, and runs pose analysis for person pairs and
centered persons.  The resulting model is immutable and self-contained;
everything the accessors and the query layer report is derived from it
without touching the source image again.

Models persist as JSON documents that mirror the in-memory structure
one-to-one, so a stored model can be queried without re-running analysis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean
from typing import Any

from .config import SymmetryConfig, config_from_dict, config_to_dict
from .descriptors import (
    ElementDescriptor,
    ImageDescriptor,
    ParseError,
    SchemaError,
    element_to_dict,
    _as_dict,
    _as_list,
    _as_number,
    _as_str,
    _parse_element,
    _require,
)
from .geometry import SymmetryAxis
from .similarity import (
    MissingLayerError,
    TaxonomyGraph,
    UnknownLabelError,
    perceptual_similarity,
    semantic_similarity,
)
from .symmetry import (
    CenteredElement,
    DivergenceRecord,
    MissingJointsError,
    PoseSymmetryReport,
    SymmetryPair,
    classify_structure,
    pose_pair_symmetry,
    pose_self_symmetry,
    propose_pairs,
)

OBJECT_KINDS = frozenset({"object", "person"})


class UnknownSubjectError(Exception):
    def __init__(self, subject):
        super().__init__(f"subject {subject!r} not in model")
        self.subject = subject


@dataclass(frozen=True)
class InterpretationModel:
    image_id: str
    axis: SymmetryAxis
    config: SymmetryConfig
    pairs: tuple[SymmetryPair, ...]
    singles: tuple[CenteredElement, ...]
    unmatched: tuple[str, ...]
    pose_reports: tuple[PoseSymmetryReport, ...]
    elements: dict[str, ElementDescriptor] = field(default_factory=dict)


@dataclass(frozen=True)
class SymmetryStats:
    """Aggregate symmetry figures for one element scope of one image.

    mean_divergence and mean_similarity are None when the scope holds no
    pairs or singles to average over.
    """

    num_elements: int
    num_symmetric: int
    mean_divergence: float | None
    mean_similarity: float | None
    relative_symmetry: float


# ---------------------------------------------------------------------------
# construction


def _attach_similarity(
    pair: SymmetryPair,
    left: ElementDescriptor,
    right: ElementDescriptor,
    cfg: SymmetryConfig,
    t: TaxonomyGraph,
) -> SymmetryPair:
    layer = cfg.similarity_layer
    perceptual = None
    unmirrored = False
    left_has = layer in left.features
    right_has = layer in right.features or (
        right.features_mirrored is not None and layer in right.features_mirrored
    )
    if left_has and right_has:
        perceptual, unmirrored = perceptual_similarity(left, right, layer)
    elif left_has != right_has:
        # One side carrying the layer and the other not is an extraction bug,
        # not a benign absence.
        raise MissingLayerError(right.id if left_has else left.id, layer)
    semantic = None
    if left.classes and right.classes:
        try:
            semantic = semantic_similarity(left.classes, right.classes, t)
        except UnknownLabelError as exc:
            raise UnknownLabelError(
                exc.label, context=f"pair ({left.id!r}, {right.id!r})"
            ) from exc
    return replace(
        pair,
        perceptual_similarity=perceptual,
        semantic_similarity=semantic,
        unmirrored=unmirrored,
    )


def build_model(
    d: ImageDescriptor, cfg: SymmetryConfig, t: TaxonomyGraph
) -> InterpretationModel:
    """Analyze one validated descriptor into an interpretation model."""
    axis = SymmetryAxis(
        x=cfg.axis_x_fraction * d.width, image_width=d.width, image_height=d.height
    )
    elements = {e.id: e for e in d.elements}
    raw_pairs, singles, unmatched = propose_pairs(list(d.elements), axis, cfg)
    pairs = tuple(
        _attach_similarity(p, elements[p.left_id], elements[p.right_id], cfg, t)
        for p in raw_pairs
    )

    reports: list[PoseSymmetryReport] = []
    for p in pairs:
        left = elements[p.left_id]
        right = elements[p.right_id]
        if left.kind == "person" and right.kind == "person" and left.pose and right.pose:
            try:
                reports.append(
                    pose_pair_symmetry(
                        left.pose, right.pose, axis, cfg,
                        bbox1=left.bbox, bbox2=right.bbox,
                        subject=(p.left_id, p.right_id),
                    )
                )
            except MissingJointsError:
                pass
    for s in singles:
        e = elements[s.element_id]
        if e.kind == "person" and e.pose:
            try:
                reports.append(
                    pose_self_symmetry(e.pose, cfg, bbox=e.bbox, subject=(s.element_id,))
                )
            except MissingJointsError:
                pass

    return InterpretationModel(
        image_id=d.image_id,
        axis=axis,
        config=cfg,
        pairs=pairs,
        singles=tuple(singles),
        unmatched=tuple(unmatched),
        pose_reports=tuple(reports),
        elements=elements,
    )


# ---------------------------------------------------------------------------
# accessors

Group = tuple[str, ...]


def symmetrical_elements(m: InterpretationModel) -> list[Group]:
    return list(classify_structure(list(m.pairs), list(m.singles), m.config)[0])


def non_symmetrical_elements(m: InterpretationModel) -> list[Group]:
    return list(classify_structure(list(m.pairs), list(m.singles), m.config)[1])


def _group_kind(m: InterpretationModel, group: Group) -> str:
    return m.elements[group[0]].kind


def symmetrical_objects(m: InterpretationModel) -> list[Group]:
    return [g for g in symmetrical_elements(m) if _group_kind(m, g) in OBJECT_KINDS]


def non_symmetrical_objects(m: InterpretationModel) -> list[Group]:
    """Object and person groups that fail the symmetry test, including
    unmatched ones: an off-axis object with no partner is reported here as
    a group of one."""
    out = [g for g in non_symmetrical_elements(m) if _group_kind(m, g) in OBJECT_KINDS]
    out.extend((i,) for i in m.unmatched if m.elements[i].kind in OBJECT_KINDS)
    return out


def symmetrical_body_pose(m: InterpretationModel) -> list[tuple[Group, tuple[str, ...]]]:
    return [(r.subject, r.symmetric_parts) for r in m.pose_reports]


def non_symmetrical_body_pose(m: InterpretationModel) -> list[tuple[Group, tuple[str, ...]]]:
    return [(r.subject, r.asymmetric_parts) for r in m.pose_reports]


def _stats_for_kinds(m: InterpretationModel, kinds: frozenset[str]) -> SymmetryStats:
    ids = [i for i, e in m.elements.items() if e.kind in kinds]
    id_set = set(ids)
    pairs = [p for p in m.pairs if p.left_id in id_set]
    singles = [s for s in m.singles if s.element_id in id_set]
    symmetric, _ = classify_structure(pairs, singles, m.config)
    num_symmetric = sum(len(g) for g in symmetric)
    divergences = [p.divergence.mean for p in pairs] + [s.divergence.mean for s in singles]
    similarities = [p.perceptual_similarity for p in pairs if p.perceptual_similarity is not None]
    return SymmetryStats(
        num_elements=len(ids),
        num_symmetric=num_symmetric,
        mean_divergence=fmean(divergences) if divergences else None,
        mean_similarity=fmean(similarities) if similarities else None,
        relative_symmetry=num_symmetric / len(ids) if ids else 0.0,
    )


def symmetry_stats(m: InterpretationModel) -> SymmetryStats:
    """Stats over patch elements."""
    return _stats_for_kinds(m, frozenset({"patch"}))


def symmetrical_objects_stats(m: InterpretationModel) -> SymmetryStats:
    """Stats over object and person elements."""
    return _stats_for_kinds(m, OBJECT_KINDS)


def _as_group(subject) -> Group:
    if isinstance(subject, str):
        return (subject,)
    return tuple(subject)


def divergence_of(m: InterpretationModel, subject) -> DivergenceRecord:
    group = _as_group(subject)
    if len(group) == 2:
        for p in m.pairs:
            if (p.left_id, p.right_id) == group:
                return p.divergence
    elif len(group) == 1:
        for s in m.singles:
            if s.element_id == group[0]:
                return s.divergence
    raise UnknownSubjectError(subject)


@dataclass(frozen=True)
class SimilarityScores:
    perceptual: float | None
    semantic: float | None
    layer: str
    unmirrored: bool


def similarity_of(m: InterpretationModel, subject) -> SimilarityScores:
    group = _as_group(subject)
    if len(group) == 2:
        for p in m.pairs:
            if (p.left_id, p.right_id) == group:
                return SimilarityScores(
                    perceptual=p.perceptual_similarity,
                    semantic=p.semantic_similarity,
                    layer=m.config.similarity_layer,
                    unmirrored=p.unmirrored,
                )
    raise UnknownSubjectError(subject)


# ---------------------------------------------------------------------------
# persistence

STATS_CSV_HEADER = "image_id,NP,NSP,rel_sym,MD,MS"


def stats_csv_row(image_id: str, stats: SymmetryStats) -> str:
    md = stats.mean_divergence if stats.mean_divergence is not None else 0.0
    ms = stats.mean_similarity if stats.mean_similarity is not None else 0.0
    return (
        f"{image_id},{stats.num_elements},{stats.num_symmetric},"
        f"{stats.relative_symmetry!r},{md!r},{ms!r}"
    )


def _divergence_to_dict(r: DivergenceRecord) -> dict:
    return {
        "position": r.position,
        "size": r.size,
        "aspect_ratio": r.aspect_ratio,
        "pose": r.pose,
        "mean": r.mean,
    }


def _divergence_from_dict(raw: Any, path: str) -> DivergenceRecord:
    obj = _as_dict(raw, path)

    def opt(key: str) -> float | None:
        v = obj.get(key)
        return None if v is None else _as_number(v, f"{path}.{key}")

    return DivergenceRecord(
        position=_as_number(_require(obj, "position", path), f"{path}.position"),
        size=opt("size"),
        aspect_ratio=opt("aspect_ratio"),
        pose=opt("pose"),
        mean=_as_number(_require(obj, "mean", path), f"{path}.mean"),
    )


def model_to_dict(m: InterpretationModel) -> dict:
    return {
        "image_id": m.image_id,
        "axis": {
            "x": m.axis.x,
            "image_width": m.axis.image_width,
            "image_height": m.axis.image_height,
        },
        "config": config_to_dict(m.config),
        "pairs": [
            {
                "left_id": p.left_id,
                "right_id": p.right_id,
                "divergence": _divergence_to_dict(p.divergence),
                "perceptual_similarity": p.perceptual_similarity,
                "semantic_similarity": p.semantic_similarity,
                "unmirrored": p.unmirrored,
            }
            for p in m.pairs
        ],
        "singles": [
            {"element_id": s.element_id, "divergence": _divergence_to_dict(s.divergence)}
            for s in m.singles
        ],
        "unmatched": list(m.unmatched),
        "pose_reports": [
            {
                "subject": list(r.subject),
                "symmetric_parts": list(r.symmetric_parts),
                "asymmetric_parts": list(r.asymmetric_parts),
                "per_joint_divergence": {
                    f"{a}/{b}": v for (a, b), v in r.per_joint_divergence.items()
                },
                "facing_symmetric": r.facing_symmetric,
                "skipped_pairs": [list(pair) for pair in r.skipped_pairs],
            }
            for r in m.pose_reports
        ],
        "elements": {i: element_to_dict(e) for i, e in m.elements.items()},
    }


def save_model(m: InterpretationModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(model_to_dict(m), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _check_ids(m: InterpretationModel) -> None:
    referenced: list[str] = []
    for p in m.pairs:
        referenced.extend((p.left_id, p.right_id))
    referenced.extend(s.element_id for s in m.singles)
    referenced.extend(m.unmatched)
    for i in referenced:
        if i not in m.elements:
            raise SchemaError("elements", f"referenced element id {i!r} missing")
    if len(set(referenced)) != len(referenced):
        raise SchemaError("elements", "pairs, singles, and unmatched overlap")


def model_from_dict(raw: dict) -> InterpretationModel:
    obj = _as_dict(raw, "")
    axis_obj = _as_dict(_require(obj, "axis", ""), "axis")
    axis = SymmetryAxis(
        x=_as_number(_require(axis_obj, "x", "axis"), "axis.x"),
        image_width=_as_number(_require(axis_obj, "image_width", "axis"), "axis.image_width"),
        image_height=_as_number(_require(axis_obj, "image_height", "axis"), "axis.image_height"),
    )
    pairs = []
    for i, p in enumerate(_as_list(obj.get("pairs", []), "pairs")):
        pobj = _as_dict(p, f"pairs[{i}]")
        perceptual = pobj.get("perceptual_similarity")
        semantic = pobj.get("semantic_similarity")
        pairs.append(
            SymmetryPair(
                left_id=_as_str(_require(pobj, "left_id", f"pairs[{i}]"), f"pairs[{i}].left_id"),
                right_id=_as_str(_require(pobj, "right_id", f"pairs[{i}]"), f"pairs[{i}].right_id"),
                divergence=_divergence_from_dict(
                    _require(pobj, "divergence", f"pairs[{i}]"), f"pairs[{i}].divergence"
                ),
                perceptual_similarity=None if perceptual is None else _as_number(
                    perceptual, f"pairs[{i}].perceptual_similarity"
                ),
                semantic_similarity=None if semantic is None else _as_number(
                    semantic, f"pairs[{i}].semantic_similarity"
                ),
                unmirrored=bool(pobj.get("unmirrored", False)),
            )
        )
    singles = []
    for i, s in enumerate(_as_list(obj.get("singles", []), "singles")):
        sobj = _as_dict(s, f"singles[{i}]")
        singles.append(
            CenteredElement(
                element_id=_as_str(
                    _require(sobj, "element_id", f"singles[{i}]"), f"singles[{i}].element_id"
                ),
                divergence=_divergence_from_dict(
                    _require(sobj, "divergence", f"singles[{i}]"), f"singles[{i}].divergence"
                ),
            )
        )
    reports = []
    for i, r in enumerate(_as_list(obj.get("pose_reports", []), "pose_reports")):
        robj = _as_dict(r, f"pose_reports[{i}]")
        path = f"pose_reports[{i}]"
        per_joint = {}
        for key, v in _as_dict(robj.get("per_joint_divergence", {}), f"{path}.per_joint_divergence").items():
            a, sep, b = key.partition("/")
            if not sep:
                raise SchemaError(f"{path}.per_joint_divergence", f"bad joint-pair key {key!r}")
            per_joint[(a, b)] = _as_number(v, f"{path}.per_joint_divergence.{key}")
        facing = robj.get("facing_symmetric")
        reports.append(
            PoseSymmetryReport(
                subject=tuple(
                    _as_str(x, f"{path}.subject[{j}]")
                    for j, x in enumerate(_as_list(_require(robj, "subject", path), f"{path}.subject"))
                ),
                symmetric_parts=tuple(
                    _as_str(x, f"{path}.symmetric_parts[{j}]")
                    for j, x in enumerate(_as_list(robj.get("symmetric_parts", []), f"{path}.symmetric_parts"))
                ),
                asymmetric_parts=tuple(
                    _as_str(x, f"{path}.asymmetric_parts[{j}]")
                    for j, x in enumerate(_as_list(robj.get("asymmetric_parts", []), f"{path}.asymmetric_parts"))
                ),
                per_joint_divergence=per_joint,
                facing_symmetric=None if facing is None else bool(facing),
                skipped_pairs=tuple(
                    (pair[0], pair[1])
                    for pair in _as_list(robj.get("skipped_pairs", []), f"{path}.skipped_pairs")
                ),
            )
        )
    elements = {}
    for i, e in _as_dict(obj.get("elements", {}), "elements").items():
        parsed = _parse_element(e, f"elements.{i}")
        if parsed.id != i:
            raise SchemaError(f"elements.{i}", f"key does not match element id {parsed.id!r}")
        elements[i] = parsed
    model = InterpretationModel(
        image_id=_as_str(_require(obj, "image_id", ""), "image_id"),
        axis=axis,
        config=config_from_dict(_as_dict(_require(obj, "config", ""), "config")),
        pairs=tuple(pairs),
        singles=tuple(singles),
        unmatched=tuple(
            _as_str(x, f"unmatched[{i}]")
            for i, x in enumerate(_as_list(obj.get("unmatched", []), "unmatched"))
        ),
        pose_reports=tuple(reports),
        elements=elements,
    )
    _check_ids(model)
    return model


def load_model(path: str | Path) -> InterpretationModel:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return model_from_dict(raw)
