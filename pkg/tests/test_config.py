"""Configuration loading, defaults, and hashing."""

import json

import pytest

from reflsym.config import (
    ConfigError,
    SymmetryConfig,
    config_from_dict,
    config_hash,
    load_config,
    save_config,
)
from reflsym.joints import DEFAULT_JOINT_PAIRS


def test_defaults():
    cfg = SymmetryConfig()
    assert cfg.axis_x_fraction == 0.5
    assert cfg.on_eps_fraction == 0.02
    assert cfg.divergence_threshold == 0.10
    assert cfg.similarity_threshold == 0.70
    assert cfg.similarity_layer == "conv5"
    assert cfg.joint_pairs == DEFAULT_JOINT_PAIRS


def test_partial_file_fills_defaults(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"divergence_threshold": 0.2}), encoding="utf-8")
    cfg = load_config(path)
    assert cfg.divergence_threshold == 0.2
    assert cfg.similarity_layer == "conv5"


def test_unknown_key_is_rejected_by_name():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"divergence_treshold": 0.2})
    assert exc.value.field_path == "divergence_treshold"


@pytest.mark.parametrize(
    "field,value",
    [("axis_x_fraction", 0.0), ("axis_x_fraction", 1.0), ("on_eps_fraction", -0.1),
     ("divergence_threshold", 0.0), ("similarity_threshold", 1.5)],
)
def test_invalid_values(field, value):
    with pytest.raises(ConfigError):
        SymmetryConfig(**{field: value})


def test_round_trip(tmp_path):
    cfg = SymmetryConfig(divergence_threshold=0.15, joint_pairs=(("left_eye", "right_eye"),))
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_hash_stable_and_value_sensitive():
    a = SymmetryConfig()
    b = SymmetryConfig()
    c = SymmetryConfig(similarity_threshold=0.8)
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)
    assert len(config_hash(a)) == 64
