"""Extraction pipeline configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path


class ExtractError(Exception):
    """Base class for extraction failures."""


class ConfigError(ExtractError):
    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"config {key}: {reason}")


class DecodeError(ExtractError):
    """The input file could not be decoded as an image."""


DEFAULT_LAYERS = ("conv1", "conv2", "conv3", "conv4", "conv5")


@dataclass(frozen=True)
class ExtractionConfig:
    """Tunable parameters of the image-to-descriptor pipeline.

    Proposals come from graph-based segmentation, deduplicated by IoU and
    capped; the detector stage promotes confident, large-enough proposals
    to objects.  The bundled backends are deterministic stand-ins wired
    through the same interface a learned model would use; `pose_model`
    only accepts "none", so emitted elements never carry pose entries.
    """

    proposal_method: str = "felzenszwalb"
    max_proposals: int = 40
    nms_iou: float = 0.5
    min_area_fraction: float = 0.002
    background_max_fraction: float = 0.9
    fz_scale: float = 100.0
    fz_sigma: float = 0.8
    fz_min_size: int = 20
    detector_model: str = "prototype-v1"
    confidence_floor: float = 0.55
    object_min_area_fraction: float = 0.02
    pose_model: str = "none"
    feature_network: str = "bank-v1"
    layers: tuple[str, ...] = field(default=DEFAULT_LAYERS)
    top_k: int = 5
    input_size: int = 32
    resize_policy: str = "aspect-pad"

    def __post_init__(self):
        if self.proposal_method != "felzenszwalb":
            raise ConfigError("proposal_method", f"unknown method {self.proposal_method!r}")
        if self.max_proposals < 1:
            raise ConfigError("max_proposals", f"must be at least 1, got {self.max_proposals}")
        if not 0.0 <= self.nms_iou <= 1.0:
            raise ConfigError("nms_iou", f"must be in [0, 1], got {self.nms_iou}")
        if not 0.0 <= self.confidence_floor <= 1.0:
            raise ConfigError("confidence_floor",
                              f"must be in [0, 1], got {self.confidence_floor}")
        if self.pose_model != "none":
            raise ConfigError("pose_model", f"unknown model {self.pose_model!r}")
        if not self.layers:
            raise ConfigError("layers", "must name at least one layer")
        if not 1 <= self.top_k <= 5:
            raise ConfigError("top_k", f"must be in 1..5, got {self.top_k}")
        if self.input_size < 8:
            raise ConfigError("input_size", f"must be at least 8, got {self.input_size}")
        if self.resize_policy != "aspect-pad":
            raise ConfigError("resize_policy", f"unknown policy {self.resize_policy!r}")


def load_config(path: str | Path) -> ExtractionConfig:
    """Read a config from JSON; unknown keys are rejected, not ignored."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ConfigError("", f"expected a JSON object, got {type(raw).__name__}")
    known = {f.name for f in fields(ExtractionConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
    if "layers" in raw:
        raw = dict(raw, layers=tuple(raw["layers"]))
    return ExtractionConfig(**raw)
