"""Perceptual and semantic similarity of image elements.

Perceptual similarity is cosine similarity between feature vectors, with
the right-hand element contributing features of its mirrored crop so that
a perfect reflection scores 1.0.  Semantic similarity compares predicted
class labels through a rooted is-a taxonomy using Wu-Palmer similarity,
weighting label pairs by the product of their prediction scores.

A small taxonomy covering common detector classes ships with the package;
callers with richer label sets load their own tree via load_taxonomy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .descriptors import ClassPrediction, ElementDescriptor


class SimilarityError(Exception):
    pass


class DimensionMismatchError(SimilarityError):
    pass


class ZeroVectorError(SimilarityError):
    pass


class MissingLayerError(SimilarityError):
    """An element lacks features for the requested layer."""

    def __init__(self, element_id: str, layer: str):
        super().__init__(f"element {element_id!r} has no features for layer {layer!r}")
        self.element_id = element_id
        self.layer = layer


class TaxonomyError(SimilarityError):
    """A taxonomy file or edge list does not form a rooted single-parent tree."""


class UnknownLabelError(SimilarityError):
    def __init__(self, label: str, context: str | None = None):
        where = f" in {context}" if context else ""
        super().__init__(f"label {label!r} not in taxonomy{where}")
        self.label = label


class EmptyPredictionsError(SimilarityError):
    pass


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v) or len(u) == 0:
        raise DimensionMismatchError(f"dimensions {len(u)} and {len(v)}")
    dot = math.fsum(a * b for a, b in zip(u, v))
    uu = math.fsum(a * a for a in u)
    vv = math.fsum(b * b for b in v)
    if uu == 0.0 or vv == 0.0:
        raise ZeroVectorError("cosine similarity undefined for a zero vector")
    # dot/sqrt(uu*vv) gives exactly 1.0 for u == v; rounding can still push
    # |cos| a hair past 1 in general, so clamp to the documented range.
    return max(-1.0, min(1.0, dot / math.sqrt(uu * vv)))


def perceptual_similarity(
    left: ElementDescriptor, right: ElementDescriptor, layer: str
) -> tuple[float, bool]:
    """Cosine of left features against the right element's mirrored-crop features.

    Returns (similarity, unmirrored).  When the right element carries no
    mirrored features for the layer, its plain features stand in and the
    unmirrored flag is set so downstream records can mark the fallback.
    """
    if layer not in left.features:
        raise MissingLayerError(left.id, layer)
    unmirrored = False
    if right.features_mirrored is not None and layer in right.features_mirrored:
        other = right.features_mirrored[layer]
    elif layer in right.features:
        other = right.features[layer]
        unmirrored = True
    else:
        raise MissingLayerError(right.id, layer)
    return cosine_similarity(left.features[layer], other), unmirrored


# ---------------------------------------------------------------------------
# taxonomy


@dataclass(frozen=True)
class TaxonomyGraph:
    """Rooted single-parent is-a tree over class labels."""

    root: str
    parent: dict[str, str]

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.parent) | {self.root}

    def __contains__(self, label: str) -> bool:
        return label == self.root or label in self.parent

    def path_to_root(self, label: str) -> tuple[str, ...]:
        """Ancestors of label starting at the label itself, ending at root."""
        if label not in self:
            raise UnknownLabelError(label)
        chain = [label]
        while chain[-1] != self.root:
            chain.append(self.parent[chain[-1]])
        return tuple(chain)

    def depth(self, label: str) -> int:
        """Node depth counted from 1 at the root."""
        return len(self.path_to_root(label))

    def lowest_common_subsumer(self, a: str, b: str) -> str:
        ancestors_a = set(self.path_to_root(a))
        for node in self.path_to_root(b):
            if node in ancestors_a:
                return node
        return self.root


def taxonomy_from_edges(root: str, edges: Iterable[tuple[str, str]]) -> TaxonomyGraph:
    parent: dict[str, str] = {}
    for child, par in edges:
        if child == root:
            raise TaxonomyError(f"root {root!r} cannot have a parent")
        if child in parent:
            raise TaxonomyError(f"node {child!r} has two parents: {parent[child]!r} and {par!r}")
        parent[child] = par
    graph = TaxonomyGraph(root=root, parent=parent)
    # Walking to the root from every node proves both connectivity and
    # acyclicity in one pass.
    for node in parent:
        seen = {node}
        cur = node
        while cur != root:
            cur = parent.get(cur)
            if cur is None:
                raise TaxonomyError(f"node {node!r} is not connected to the root")
            if cur in seen:
                raise TaxonomyError(f"cycle through node {cur!r}")
            seen.add(cur)
    return graph


def load_taxonomy(path: str | Path) -> TaxonomyGraph:
    """Read a taxonomy file: root label on line 1, then `child<TAB>parent` lines.

    Blank lines and lines starting with '#' are skipped.
    """
    lines = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise TaxonomyError(f"{path}: empty taxonomy file")
    root = lines[0]
    if "\t" in root:
        raise TaxonomyError(f"{path}: line 1 must declare the root label, found an edge")
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise TaxonomyError(f"{path}: line {i}: expected `child<TAB>parent`, got {line!r}")
        edges.append((parts[0], parts[1]))
    return taxonomy_from_edges(root, edges)


def bundled_taxonomy() -> TaxonomyGraph:
    """The packaged mini-taxonomy of common detector classes."""
    ref = resources.files("reflsym").joinpath("data/mini_taxonomy.tsv")
    with resources.as_file(ref) as path:
        return load_taxonomy(path)


def wup_similarity(a: str, b: str, t: TaxonomyGraph) -> float:
    """Wu-Palmer similarity: 2*depth(lcs) / (depth(a) + depth(b)), root depth 1."""
    lcs = t.lowest_common_subsumer(a, b)
    return 2.0 * t.depth(lcs) / (t.depth(a) + t.depth(b))


def semantic_similarity(
    ci: Sequence[ClassPrediction], cj: Sequence[ClassPrediction], t: TaxonomyGraph
) -> float:
    """Score-weighted mean Wu-Palmer similarity over all cross pairs of predictions."""
    if not ci or not cj:
        raise EmptyPredictionsError("both prediction lists must be nonempty")
    num = 0.0
    den = 0.0
    for a in ci:
        for b in cj:
            w = a.score * b.score
            num += w * wup_similarity(a.label, b.label, t)
            den += w
    if den == 0.0:
        # All-zero scores carry no weighting information; fall back to the
        # unweighted mean over the same cross pairs.
        sims = [wup_similarity(a.label, b.label, t) for a in ci for b in cj]
        return math.fsum(sims) / len(sims)
    return num / den
