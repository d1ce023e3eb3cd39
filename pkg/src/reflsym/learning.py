"""Symmetry-rating prediction: feature assembly, learners, cross-validation.

Three feature sets summarize an image at increasing semantic depth: fs1
holds per-layer cosine similarities between the image halves, fs2
aggregates the patch-level symmetry structure, fs3 does the same for
objects and persons plus body-pose aggregates.  Absent sets stay absent;
they are never zero-filled silently.

The learners are depth-capped decision trees built from scratch: splits
are chosen by Gini impurity (classifier) or variance reduction
(regressor), ties broken toward the lowest feature index and threshold,
so training is deterministic with no dependency on library internals.
The learner interface is small on purpose; a stronger learner can replace
the trees without touching the harness.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Sequence

from .descriptors import ImageDescriptor
from .model import InterpretationModel, SymmetryStats, symmetrical_objects_stats, symmetry_stats
from .similarity import MissingLayerError, cosine_similarity

CLASS_LABELS = ("not_symmetric", "somewhat_symmetric", "symmetric", "highly_symmetric")

FS1_LAYERS = ("conv1", "conv2", "conv3", "conv4", "conv5")

FS1_LEN = 5
FS2_LEN = 9
FS3_LEN = 12

MAX_DEPTH = 6

FEATURE_MASKS = {
    "fs1": ("fs1",),
    "fs1+2": ("fs1", "fs2"),
    "fs1+2+3": ("fs1", "fs2", "fs3"),
}

FEATURE_FILE_MAGIC = "# reflsym-features layout=v1"


class LearningError(Exception):
    pass


class EmptyTrainingSetError(LearningError):
    pass


class TooFewExamplesError(LearningError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    """Per-image features; a set absent from the source data is None."""

    image_id: str
    fs1: tuple[float, ...] | None
    fs2: tuple[float, ...] | None
    fs3: tuple[float, ...] | None
    fs2_empty_scope: bool = False
    fs3_empty_scope: bool = False

    @property
    def mask(self) -> str:
        present = [name for name in ("fs1", "fs2", "fs3") if getattr(self, name) is not None]
        if not present:
            return "none"
        return present[0] + "".join("+" + p[2] for p in present[1:])


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    symmetry_class: str
    mean_symmetry: float
    response_variance: float
    class_probs: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.symmetry_class not in CLASS_LABELS:
            raise ValueError(f"unknown symmetry class {self.symmetry_class!r}")


@dataclass(frozen=True)
class EvalReport:
    classification_accuracy: float
    avg_symmetry_mse: float
    class_prob_mse: float
    per_class_prob_mse: tuple[float, float, float, float]
    folds: int
    seed: int
    feature_mask: str
    fold_accuracies: tuple[float, ...]
    fold_assignments: tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# feature assembly


def assemble_fs1(d: ImageDescriptor, layers: Sequence[str] = FS1_LAYERS) -> tuple[float, ...]:
    """Cosine similarity of the left half against the mirrored right half,
    one value per configured layer."""
    out = []
    for layer in layers:
        if layer not in d.half_features:
            raise MissingLayerError(d.image_id, layer)
        h = d.half_features[layer]
        out.append(cosine_similarity(h.left, h.right_mirrored))
    return tuple(out)


def _scope_aggregates(m: InterpretationModel, stats: SymmetryStats, ids: set[str]) -> list[float]:
    pairs = [p for p in m.pairs if p.left_id in ids]
    singles = [s for s in m.singles if s.element_id in ids]
    divergences = [p.divergence.mean for p in pairs] + [s.divergence.mean for s in singles]
    similarities = [p.perceptual_similarity for p in pairs if p.perceptual_similarity is not None]
    return [
        float(stats.num_elements),
        float(stats.num_symmetric),
        stats.relative_symmetry,
        stats.mean_divergence if stats.mean_divergence is not None else 0.0,
        stats.mean_similarity if stats.mean_similarity is not None else 0.0,
        min(divergences) if divergences else 0.0,
        max(divergences) if divergences else 0.0,
        min(similarities) if similarities else 0.0,
        max(similarities) if similarities else 0.0,
    ]


def assemble_fs2(m: InterpretationModel) -> tuple[float, ...]:
    """Patch-scope aggregate: counts, relative symmetry, mean/min/max
    divergence, mean/min/max perceptual similarity.  Empty scopes yield
    zeros; callers needing to distinguish that consult the stats op."""
    ids = {i for i, e in m.elements.items() if e.kind == "patch"}
    return tuple(_scope_aggregates(m, symmetry_stats(m), ids))


def assemble_fs3(m: InterpretationModel) -> tuple[float, ...]:
    """Object/person-scope aggregate plus pose summary: symmetric and
    asymmetric part counts and mean per-joint pose divergence."""
    ids = {i for i, e in m.elements.items() if e.kind in ("object", "person")}
    values = _scope_aggregates(m, symmetrical_objects_stats(m), ids)
    joint_divs = [v for r in m.pose_reports for v in r.per_joint_divergence.values()]
    values.extend([
        float(sum(len(r.symmetric_parts) for r in m.pose_reports)),
        float(sum(len(r.asymmetric_parts) for r in m.pose_reports)),
        fmean(joint_divs) if joint_divs else 0.0,
    ])
    return tuple(values)


def assemble_features(
    d: ImageDescriptor, m: InterpretationModel, layers: Sequence[str] = FS1_LAYERS
) -> FeatureVector:
    """Bundle all three sets for one image; fs1 is absent when the
    descriptor carries no half features at all."""
    fs1 = assemble_fs1(d, layers) if d.half_features else None
    return FeatureVector(
        image_id=d.image_id,
        fs1=fs1,
        fs2=assemble_fs2(m),
        fs3=assemble_fs3(m),
        fs2_empty_scope=symmetry_stats(m).num_elements == 0,
        fs3_empty_scope=symmetrical_objects_stats(m).num_elements == 0,
    )


def flatten_features(fv: FeatureVector, feature_mask: str) -> tuple[float, ...]:
    """Concatenate the masked sets; an absent selected set is an error."""
    if feature_mask not in FEATURE_MASKS:
        raise ValueError(f"unknown feature mask {feature_mask!r}, expected one of {sorted(FEATURE_MASKS)}")
    out: list[float] = []
    for name in FEATURE_MASKS[feature_mask]:
        values = getattr(fv, name)
        if values is None:
            raise ValueError(f"image {fv.image_id!r} has no {name} features")
        out.extend(values)
    return tuple(out)


# ---------------------------------------------------------------------------
# decision trees


def _gini(counts: Sequence[int]) -> float:
    n = sum(counts)
    if n == 0:
        return 0.0
    return 1.0 - sum((c / n) ** 2 for c in counts)


def _class_counts(y: Sequence[int]) -> list[int]:
    counts = [0] * len(CLASS_LABELS)
    for v in y:
        counts[v] += 1
    return counts


def _variance(y: Sequence[float]) -> float:
    if not y:
        return 0.0
    mu = fmean(y)
    return fmean([(v - mu) ** 2 for v in y])


def _best_split(X: list[tuple[float, ...]], y: list, impurity) -> tuple[int, float] | None:
    n = len(X)
    parent = impurity(y)
    best = None
    best_score = parent - 1e-12
    for j in range(len(X[0])):
        values = sorted({x[j] for x in X})
        for lo, hi in zip(values, values[1:]):
            t = (lo + hi) / 2.0
            left = [y[i] for i in range(n) if X[i][j] <= t]
            right = [y[i] for i in range(n) if X[i][j] > t]
            score = (len(left) * impurity(left) + len(right) * impurity(right)) / n
            # Strict comparison keeps the first (lowest feature index, lowest
            # threshold) among equally good splits.
            if score < best_score:
                best_score = score
                best = (j, t)
    return best


def _build_tree(X: list, y: list, depth: int, impurity, make_leaf) -> dict:
    if depth >= MAX_DEPTH or len(set(y)) <= 1 or len(y) < 2:
        return make_leaf(y)
    split = _best_split(X, y, impurity)
    if split is None:
        return make_leaf(y)
    j, t = split
    left_idx = [i for i in range(len(X)) if X[i][j] <= t]
    right_idx = [i for i in range(len(X)) if X[i][j] > t]
    return {
        "feature": j,
        "threshold": t,
        "left": _build_tree([X[i] for i in left_idx], [y[i] for i in left_idx],
                            depth + 1, impurity, make_leaf),
        "right": _build_tree([X[i] for i in right_idx], [y[i] for i in right_idx],
                             depth + 1, impurity, make_leaf),
    }


def _walk(tree: dict, x: tuple[float, ...]) -> dict:
    node = tree
    while "feature" in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    feature_mask: str
    n_features: int
    seed: int
    tree: dict


def _training_matrix(
    train: Sequence[LabeledExample], feature_mask: str
) -> list[tuple[float, ...]]:
    if not train:
        raise EmptyTrainingSetError("no training examples")
    X = [flatten_features(e.features, feature_mask) for e in train]
    widths = {len(x) for x in X}
    if len(widths) != 1:
        raise ValueError(f"inconsistent feature widths {sorted(widths)}")
    return X


def train_classifier(
    train: Sequence[LabeledExample], feature_mask: str, seed: int = 0
) -> TrainedModel:
    X = _training_matrix(train, feature_mask)
    y = [CLASS_LABELS.index(e.symmetry_class) for e in train]

    def leaf(labels: list) -> dict:
        counts = _class_counts(labels)
        total = sum(counts)
        return {"probs": [c / total for c in counts]}

    tree = _build_tree(X, y, 0, lambda ys: _gini(_class_counts(ys)), leaf)
    return TrainedModel("classifier", feature_mask, len(X[0]), seed, tree)


def predict_class(model: TrainedModel, fv: FeatureVector) -> tuple[str, tuple[float, ...]]:
    x = flatten_features(fv, model.feature_mask)
    if len(x) != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {len(x)}")
    probs = tuple(_walk(model.tree, x)["probs"])
    best = max(range(len(CLASS_LABELS)), key=lambda i: (probs[i], -i))
    return CLASS_LABELS[best], probs


def train_regressor(
    train: Sequence[LabeledExample], feature_mask: str, seed: int = 0
) -> TrainedModel:
    X = _training_matrix(train, feature_mask)
    y = [e.mean_symmetry for e in train]
    tree = _build_tree(X, y, 0, _variance, lambda ys: {"value": fmean(ys)})
    return TrainedModel("regressor", feature_mask, len(X[0]), seed, tree)


def predict_symmetry(model: TrainedModel, fv: FeatureVector) -> float:
    x = flatten_features(fv, model.feature_mask)
    if len(x) != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {len(x)}")
    return min(1.0, max(0.0, _walk(model.tree, x)["value"]))


def save_trained_model(model: TrainedModel, path: str | Path) -> None:
    doc = {
        "kind": model.kind,
        "feature_mask": model.feature_mask,
        "n_features": model.n_features,
        "seed": model.seed,
        "tree": model.tree,
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_trained_model(path: str | Path) -> TrainedModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return TrainedModel(
        kind=doc["kind"],
        feature_mask=doc["feature_mask"],
        n_features=doc["n_features"],
        seed=doc["seed"],
        tree=doc["tree"],
    )


# ---------------------------------------------------------------------------
# cross-validation


def _target_probs(e: LabeledExample) -> tuple[float, ...]:
    if e.class_probs is not None:
        return e.class_probs
    return tuple(1.0 if c == e.symmetry_class else 0.0 for c in CLASS_LABELS)


def cross_validate(
    examples: Sequence[LabeledExample], feature_mask: str, k: int = 5, seed: int = 0
) -> EvalReport:
    """Seeded k-fold evaluation of the classifier and regressor together.

    Folds are near-equal interleaved slices of a seeded shuffle; the
    report stores the assignment so every metric can be recomputed.
    Accuracy is averaged per fold, squared errors are pooled over all
    held-out predictions.
    """
    if k < 2:
        raise TooFewExamplesError(f"need at least 2 folds, got {k}")
    if len(examples) < k:
        raise TooFewExamplesError(f"{len(examples)} examples cannot fill {k} folds")
    order = list(range(len(examples)))
    random.Random(seed).shuffle(order)
    folds = [tuple(order[i::k]) for i in range(k)]

    fold_accuracies = []
    symmetry_sq: list[float] = []
    prob_sq: list[tuple[float, ...]] = []
    for fold in folds:
        held = set(fold)
        train = [examples[i] for i in order if i not in held]
        classifier = train_classifier(train, feature_mask, seed)
        regressor = train_regressor(train, feature_mask, seed)
        correct = 0
        for i in fold:
            e = examples[i]
            predicted, probs = predict_class(classifier, e.features)
            if predicted == e.symmetry_class:
                correct += 1
            target = _target_probs(e)
            prob_sq.append(tuple((p - t) ** 2 for p, t in zip(probs, target)))
            symmetry_sq.append((predict_symmetry(regressor, e.features) - e.mean_symmetry) ** 2)
        fold_accuracies.append(correct / len(fold))

    per_class = tuple(fmean(sq[c] for sq in prob_sq) for c in range(len(CLASS_LABELS)))
    return EvalReport(
        classification_accuracy=fmean(fold_accuracies),
        avg_symmetry_mse=fmean(symmetry_sq),
        class_prob_mse=fmean(v for sq in prob_sq for v in sq),
        per_class_prob_mse=per_class,
        folds=k,
        seed=seed,
        feature_mask=feature_mask,
        fold_accuracies=tuple(fold_accuracies),
        fold_assignments=tuple(folds),
    )


def report_to_dict(r: EvalReport) -> dict:
    return {
        "classification_accuracy": r.classification_accuracy,
        "avg_symmetry_mse": r.avg_symmetry_mse,
        "class_prob_mse": r.class_prob_mse,
        "per_class_prob_mse": list(r.per_class_prob_mse),
        "folds": r.folds,
        "seed": r.seed,
        "feature_mask": r.feature_mask,
        "fold_accuracies": list(r.fold_accuracies),
        "fold_assignments": [list(f) for f in r.fold_assignments],
    }


def save_report(r: EvalReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(r), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def summary_line(r: EvalReport) -> str:
    return (
        f"{r.feature_mask}: CA {100.0 * r.classification_accuracy:.1f}% | "
        f"sym MSE {r.avg_symmetry_mse:.4f} | prob MSE {r.class_prob_mse:.4f} "
        f"({r.folds} folds, seed {r.seed})"
    )


# ---------------------------------------------------------------------------
# feature and label files


def write_features_csv(features: Sequence[FeatureVector], path: str | Path) -> None:
    lengths = {"fs1": FS1_LEN, "fs2": FS2_LEN, "fs3": FS3_LEN}
    for fv in features:
        for name, n in lengths.items():
            values = getattr(fv, name)
            if values is not None and len(values) != n:
                raise ValueError(
                    f"image {fv.image_id!r}: {name} has {len(values)} values, layout v1 needs {n}"
                )
    header = (
        ["image_id"]
        + [f"fs1_{i}" for i in range(FS1_LEN)]
        + [f"fs2_{i}" for i in range(FS2_LEN)]
        + [f"fs3_{i}" for i in range(FS3_LEN)]
        + ["mask", "fs2_empty_scope", "fs3_empty_scope"]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(FEATURE_FILE_MAGIC + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for fv in features:
            row: list[str] = [fv.image_id]
            for name, n in lengths.items():
                values = getattr(fv, name)
                row.extend([""] * n if values is None else [repr(v) for v in values])
            row.extend([fv.mask, str(int(fv.fs2_empty_scope)), str(int(fv.fs3_empty_scope))])
            writer.writerow(row)


def read_features_csv(path: str | Path) -> list[FeatureVector]:
    with open(path, encoding="utf-8", newline="") as fh:
        magic = fh.readline().strip()
        if magic != FEATURE_FILE_MAGIC:
            raise LearningError(f"{path}: not a feature file (missing {FEATURE_FILE_MAGIC!r})")
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LearningError(f"{path}: missing header row")
        out = []
        for row in reader:
            cells = dict(zip(header, row))

            def grab(prefix: str, n: int) -> tuple[float, ...] | None:
                raw = [cells[f"{prefix}_{i}"] for i in range(n)]
                if all(c == "" for c in raw):
                    return None
                return tuple(float(c) for c in raw)

            out.append(
                FeatureVector(
                    image_id=cells["image_id"],
                    fs1=grab("fs1", FS1_LEN),
                    fs2=grab("fs2", FS2_LEN),
                    fs3=grab("fs3", FS3_LEN),
                    fs2_empty_scope=cells.get("fs2_empty_scope", "0") == "1",
                    fs3_empty_scope=cells.get("fs3_empty_scope", "0") == "1",
                )
            )
    return out


def read_labels_csv(path: str | Path) -> dict[str, tuple[str, float, float]]:
    """Human ratings: one row `image_id,class,mean_symmetry,response_variance`."""
    out: dict[str, tuple[str, float, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            label = row["class"]
            if label not in CLASS_LABELS:
                raise LearningError(f"{path}: unknown class {label!r} for {row['image_id']!r}")
            out[row["image_id"]] = (
                label, float(row["mean_symmetry"]), float(row["response_variance"])
            )
    return out


def read_counts_csv(path: str | Path) -> dict[str, tuple[float, float, float, float]]:
    """Optional per-class response counts, converted to probability targets."""
    out: dict[str, tuple[float, float, float, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            counts = [float(row[c]) for c in CLASS_LABELS]
            total = sum(counts)
            if total <= 0:
                raise LearningError(f"{path}: zero response count for {row['image_id']!r}")
            out[row["image_id"]] = tuple(c / total for c in counts)
    return out


def join_examples(
    features: Sequence[FeatureVector],
    labels: dict[str, tuple[str, float, float]],
    counts: dict[str, tuple[float, float, float, float]] | None = None,
) -> list[LabeledExample]:
    """Match features to labels by image id; images lacking a label are an error."""
    out = []
    for fv in features:
        if fv.image_id not in labels:
            raise LearningError(f"no label for image {fv.image_id!r}")
        label, mean_symmetry, variance = labels[fv.image_id]
        out.append(
            LabeledExample(
                features=fv,
                symmetry_class=label,
                mean_symmetry=mean_symmetry,
                response_variance=variance,
                class_probs=counts.get(fv.image_id) if counts else None,
            )
        )
    return out
