"""Prototype class scoring mapped onto the downstream taxonomy.

The bundled detector vocabulary is scored by cosine against seeded
prototype directions in feature space, then translated to taxonomy labels
through the shipped label map; backend labels without a mapping attach to
the catch-all node so every emitted label resolves downstream.
"""

from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

import numpy as np

from .config import ExtractionConfig

VOCABULARY = (
    "auto",
    "lorry",
    "pushbike",
    "hound",
    "tabby",
    "songbird",
    "seat",
    "settee",
    "table",
    "crt",
    "notebook",
    "flask",
    "shrub",
    "bench",
    "widget",
    "texture",
)
CATCH_ALL_LABEL = "artifact"


def load_label_map(path: str | Path | None = None) -> dict[str, str]:
    """Backend label to taxonomy label, one tab-separated pair per line."""
    if path is None:
        text = resources.files("refext").joinpath("data/label_map.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    out: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        backend, _, node = line.partition("\t")
        out[backend.strip()] = node.strip()
    return out


def prototype(network: str, label: str, dim: int) -> np.ndarray:
    digest = hashlib.sha256(f"{network}/class/{label}".encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def class_predictions(
    features: tuple[float, ...], cfg: ExtractionConfig, label_map: dict[str, str]
) -> list[tuple[str, float]]:
    """Top-k (taxonomy label, score) pairs, scores in [0, 1] descending.

    Backend labels sharing a taxonomy node keep the best score, so the
    result never lists a label twice.
    """
    v = np.asarray(features, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    scored: dict[str, float] = {}
    for backend in VOCABULARY:
        p = prototype(cfg.feature_network, backend, v.size)
        c = 0.0 if norm == 0.0 else float(v @ p) / norm
        score = min(1.0, max(0.0, (c + 1.0) / 2.0))
        node = label_map.get(backend, CATCH_ALL_LABEL)
        if node not in scored or score > scored[node]:
            scored[node] = score
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[: cfg.top_k]
