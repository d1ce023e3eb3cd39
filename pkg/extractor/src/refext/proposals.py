"""Region proposals from graph-based segmentation."""

from __future__ import annotations

import numpy as np
from skimage.segmentation import felzenszwalb

from .config import ExtractionConfig

Box = tuple[float, float, float, float]


def iou(a: Box, b: Box) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    x1, y1 = max(ax, bx), max(ay, by)
    x2, y2 = min(ax + aw, bx + bw), min(ay + ah, by + bh)
    inter = max(0.0, x2 - x1) * max(0.0, y2 - y1)
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0.0 else 0.0


def propose_regions(rgb: np.ndarray, cfg: ExtractionConfig) -> list[Box]:
    """Segment-derived boxes, largest first, overlap-deduplicated, capped.

    Segments below the area floor are noise and segments above the ceiling
    are background; both are dropped before the greedy IoU pass.
    """
    labels = felzenszwalb(
        rgb, scale=cfg.fz_scale, sigma=cfg.fz_sigma, min_size=cfg.fz_min_size
    )
    area = float(labels.shape[0] * labels.shape[1])
    boxes: list[Box] = []
    for value in np.unique(labels):
        ys, xs = np.nonzero(labels == value)
        x, y = float(xs.min()), float(ys.min())
        w = float(xs.max()) - x + 1.0
        h = float(ys.max()) - y + 1.0
        fraction = w * h / area
        if fraction < cfg.min_area_fraction or fraction > cfg.background_max_fraction:
            continue
        boxes.append((x, y, w, h))

    boxes.sort(key=lambda b: (-b[2] * b[3], b[1], b[0]))
    kept: list[Box] = []
    for box in boxes:
        if len(kept) == cfg.max_proposals:
            break
        if all(iou(box, other) <= cfg.nms_iou for other in kept):
            kept.append(box)
    return kept
