"""Analysis configuration.

All thresholds are fractions of image or element extent, so one config
works across image resolutions.  Configs hash stably: two configs with
equal field values produce the same config_hash, which analysis reports
embed so results can be traced back to the settings that produced them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .joints import DEFAULT_JOINT_PAIRS


class ConfigError(Exception):
    """A config file could not be read or contains unusable values."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


@dataclass(frozen=True)
class SymmetryConfig:
    """Tunable parameters of the symmetry analysis.

    axis_x_fraction: horizontal axis position as a fraction of image width.
    on_eps_fraction: half-width of the on-axis band, fraction of image width.
    divergence_threshold: divergence at or below this counts as symmetric.
    similarity_threshold: minimum cosine similarity for perceptual symmetry.
    similarity_layer: feature layer used for perceptual comparisons.
    joint_pairs: joint name pairs whose placement the pose check compares.
    """

    axis_x_fraction: float = 0.5
    on_eps_fraction: float = 0.02
    divergence_threshold: float = 0.10
    similarity_threshold: float = 0.70
    similarity_layer: str = "conv5"
    joint_pairs: tuple[tuple[str, str], ...] = field(default=DEFAULT_JOINT_PAIRS)

    def __post_init__(self):
        if not 0.0 < self.axis_x_fraction < 1.0:
            raise ConfigError("axis_x_fraction", f"must be in (0, 1), got {self.axis_x_fraction}")
        if self.on_eps_fraction < 0.0:
            raise ConfigError("on_eps_fraction", f"must be nonnegative, got {self.on_eps_fraction}")
        if self.divergence_threshold <= 0.0:
            raise ConfigError("divergence_threshold", f"must be positive, got {self.divergence_threshold}")
        if not -1.0 <= self.similarity_threshold <= 1.0:
            raise ConfigError("similarity_threshold",
                              f"must be in [-1, 1], got {self.similarity_threshold}")
        if not self.similarity_layer:
            raise ConfigError("similarity_layer", "must be nonempty")


def config_to_dict(cfg: SymmetryConfig) -> dict:
    out = asdict(cfg)
    out["joint_pairs"] = [list(p) for p in cfg.joint_pairs]
    return out


def config_from_dict(raw: dict) -> SymmetryConfig:
    """Build a config from parsed JSON; unknown keys are an error, not a warning."""
    if not isinstance(raw, dict):
        raise ConfigError("", f"expected an object, got {type(raw).__name__}")
    known = {f.name for f in fields(SymmetryConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown config field")
    kwargs = dict(raw)
    if "joint_pairs" in kwargs:
        pairs = kwargs["joint_pairs"]
        if not isinstance(pairs, list):
            raise ConfigError("joint_pairs", f"expected an array, got {type(pairs).__name__}")
        parsed = []
        for i, p in enumerate(pairs):
            if not isinstance(p, (list, tuple)) or len(p) != 2 or not all(isinstance(s, str) for s in p):
                raise ConfigError(f"joint_pairs[{i}]", "expected a pair of joint names")
            parsed.append((p[0], p[1]))
        kwargs["joint_pairs"] = tuple(parsed)
    for name in ("axis_x_fraction", "on_eps_fraction", "divergence_threshold", "similarity_threshold"):
        if name in kwargs:
            v = kwargs[name]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(name, f"expected a number, got {type(v).__name__}")
            kwargs[name] = float(v)
    if "similarity_layer" in kwargs and not isinstance(kwargs["similarity_layer"], str):
        raise ConfigError("similarity_layer", "expected a string")
    return SymmetryConfig(**kwargs)


def load_config(path: str | Path) -> SymmetryConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: {exc}") from exc
    return config_from_dict(raw)


def save_config(cfg: SymmetryConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(config_to_dict(cfg), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def config_hash(cfg: SymmetryConfig) -> str:
    """Stable content hash of a config, for embedding in analysis reports."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def with_overrides(cfg: SymmetryConfig, **kwargs) -> SymmetryConfig:
    return replace(cfg, **kwargs)
