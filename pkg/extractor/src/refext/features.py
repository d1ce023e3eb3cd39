"""Deterministic filter-bank features.

Stands in for a pretrained network: each layer owns a seeded bank of
zero-mean 3x3 kernels and responds with pooled rectified statistics, so
equal pixels give equal features on every platform and every run.  Two
trailing slots (crop brightness and a constant) keep vectors nonzero even
on flat crops, where pure edge responses would vanish.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
from skimage.transform import resize

from .config import ExtractionConfig

KERNELS_PER_LAYER = 8
KERNEL_SIZE = 3
FEATURE_DIM = 2 * KERNELS_PER_LAYER + 2


def _seed(network: str, tag: str) -> int:
    digest = hashlib.sha256(f"{network}/{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def layer_bank(network: str, layer: str) -> np.ndarray:
    rng = np.random.default_rng(_seed(network, layer))
    k = rng.normal(size=(KERNELS_PER_LAYER, KERNEL_SIZE, KERNEL_SIZE))
    k -= k.mean(axis=(1, 2), keepdims=True)
    k /= np.abs(k).sum(axis=(1, 2), keepdims=True)
    return k


def to_gray(image: np.ndarray) -> np.ndarray:
    if image.ndim == 2:
        return image.astype(np.float64)
    return image[..., :3].astype(np.float64).mean(axis=2)


def prepare(patch: np.ndarray, input_size: int) -> np.ndarray:
    """Aspect-preserving resize onto a square canvas, center padded."""
    a = to_gray(patch)
    h, w = a.shape
    scale = input_size / max(h, w)
    nh = max(1, round(h * scale))
    nw = max(1, round(w * scale))
    if (nh, nw) != (h, w):
        a = resize(a, (nh, nw), order=1, mode="edge", anti_aliasing=False)
    out = np.zeros((input_size, input_size))
    top = (input_size - nh) // 2
    left = (input_size - nw) // 2
    out[top:top + nh, left:left + nw] = a
    return out


def bank_features(prepared: np.ndarray, network: str, layer: str) -> tuple[float, ...]:
    bank = layer_bank(network, layer)
    windows = np.lib.stride_tricks.sliding_window_view(
        prepared, (KERNEL_SIZE, KERNEL_SIZE)
    )
    responses = np.abs(np.tensordot(windows, bank, axes=([2, 3], [1, 2])))
    stats = [float(responses[..., i].mean()) for i in range(KERNELS_PER_LAYER)]
    stats += [float(responses[..., i].max()) for i in range(KERNELS_PER_LAYER)]
    stats += [float(prepared.mean()), 1.0]
    return tuple(stats)


def patch_features(
    patch: np.ndarray, cfg: ExtractionConfig
) -> tuple[dict[str, tuple[float, ...]], dict[str, tuple[float, ...]]]:
    """Per-layer features of a crop and of its horizontally flipped twin."""
    prepared = prepare(patch, cfg.input_size)
    flipped = np.fliplr(prepared)
    features = {
        layer: bank_features(prepared, cfg.feature_network, layer) for layer in cfg.layers
    }
    mirrored = {
        layer: bank_features(flipped, cfg.feature_network, layer) for layer in cfg.layers
    }
    return features, mirrored


def half_features(image: np.ndarray, cfg: ExtractionConfig) -> dict[str, dict[str, tuple]]:
    """Left-half and pre-mirrored right-half features per layer.

    The right half is flipped before feature extraction, so a perfectly
    mirrored image yields identical left/right vectors.  Odd widths drop
    the center column from both halves.
    """
    a = to_gray(image)
    half = a.shape[1] // 2
    left = prepare(a[:, :half], cfg.input_size)
    right = prepare(np.fliplr(a[:, a.shape[1] - half:]), cfg.input_size)
    return {
        layer: {
            "left": bank_features(left, cfg.feature_network, layer),
            "right_mirrored": bank_features(right, cfg.feature_network, layer),
        }
        for layer in cfg.layers
    }


def cosine(u, v) -> float:
    uu = math.fsum(a * a for a in u)
    vv = math.fsum(b * b for b in v)
    uv = math.fsum(a * b for a, b in zip(u, v))
    return uv / math.sqrt(uu * vv)
