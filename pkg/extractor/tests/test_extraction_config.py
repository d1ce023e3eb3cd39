import json

import pytest

from refext.config import ConfigError, ExtractionConfig, load_config


def test_defaults_valid():
    cfg = ExtractionConfig()
    assert cfg.layers == ("conv1", "conv2", "conv3", "conv4", "conv5")
    assert cfg.top_k == 5
    assert cfg.pose_model == "none"


def test_empty_layers_rejected():
    with pytest.raises(ConfigError):
        ExtractionConfig(layers=())


@pytest.mark.parametrize("k", [0, 6])
def test_top_k_bounds(k):
    with pytest.raises(ConfigError):
        ExtractionConfig(top_k=k)


def test_unknown_proposal_method_rejected():
    with pytest.raises(ConfigError):
        ExtractionConfig(proposal_method="selective_search")


def test_confidence_floor_range():
    with pytest.raises(ConfigError):
        ExtractionConfig(confidence_floor=1.5)


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"max_proposals": 7, "layers": ["conv1", "conv2"]}))
    cfg = load_config(p)
    assert cfg.max_proposals == 7
    assert cfg.layers == ("conv1", "conv2")


def test_load_config_unknown_key(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"max_proposls": 7}))
    with pytest.raises(ConfigError):
        load_config(p)
