"""Descriptor file contract: loading, saving, validation."""

import json

import pytest

from reflsym.descriptors import (
    ClassPrediction,
    ElementDescriptor,
    HalfFeatures,
    ImageDescriptor,
    Keypoint,
    ParseError,
    PoseDescriptor,
    SchemaError,
    ValidationError,
    descriptor_from_dict,
    descriptor_to_dict,
    load_descriptor,
    save_descriptor,
    validate_descriptor,
)
from reflsym.geometry import Point2, Rect

from conftest import FIXTURES, make_patch, make_scene


def test_fixture_loads_with_ids_preserved(perfect_scene):
    assert perfect_scene.image_id == "perfect_scene"
    assert [e.id for e in perfect_scene.elements] == ["pa_l", "pa_r", "pb_l", "pb_r", "vase_c"]


def test_all_fixtures_validate_clean():
    for path in sorted(FIXTURES.glob("*.json")):
        assert validate_descriptor(load_descriptor(path)) == [], path.name


def test_round_trip(tmp_path, people_scene):
    out = tmp_path / "copy.json"
    save_descriptor(people_scene, out)
    assert load_descriptor(out) == people_scene


def test_save_is_deterministic(tmp_path, perfect_scene):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_descriptor(perfect_scene, a)
    save_descriptor(perfect_scene, b)
    assert a.read_bytes() == b.read_bytes()


def test_malformed_json_is_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"image_id": ', encoding="utf-8")
    with pytest.raises(ParseError):
        load_descriptor(bad)


def test_missing_field_names_the_path(tmp_path):
    doc = {"image_id": "x", "width": 100}
    with pytest.raises(SchemaError) as exc:
        descriptor_from_dict(doc)
    assert exc.value.field_path == "height"


def test_negative_bbox_extent_names_the_element(tmp_path):
    doc = {
        "image_id": "x", "width": 100, "height": 100,
        "elements": [{"id": "e1", "kind": "patch", "bbox": {"x": 0, "y": 0, "w": -3, "h": 5}}],
    }
    with pytest.raises(ValidationError) as exc:
        descriptor_from_dict(doc)
    assert exc.value.violations[0].element_id == "e1"
    assert exc.value.violations[0].rule == "bbox_positive_extent"


def test_unknown_kind_is_schema_error():
    doc = {
        "image_id": "x", "width": 100, "height": 100,
        "elements": [{"id": "e1", "kind": "blob", "bbox": {"x": 0, "y": 0, "w": 3, "h": 5}}],
    }
    with pytest.raises(SchemaError):
        descriptor_from_dict(doc)


def test_unknown_extra_keys_are_ignored(tmp_path):
    path = FIXTURES / "perfect_scene.json"
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["annotator"] = "someone"
    doc["elements"][0]["zz_extra"] = [1, 2, 3]
    freeform = tmp_path / "extra.json"
    freeform.write_text(json.dumps(doc), encoding="utf-8")
    assert load_descriptor(freeform) == load_descriptor(path)


class TestValidationRules:
    def scene(self, *elements):
        return make_scene("v", 200.0, 100.0, elements)

    def rules(self, scene):
        return [v.rule for v in validate_descriptor(scene)]

    def test_clean(self):
        scene = self.scene(make_patch("a", 10, 10, 20, 20))
        assert validate_descriptor(scene) == []

    def test_duplicate_ids(self):
        scene = self.scene(make_patch("a", 10, 10, 20, 20), make_patch("a", 60, 10, 20, 20))
        assert "unique_element_ids" in self.rules(scene)

    def test_bbox_out_of_bounds(self):
        scene = self.scene(make_patch("a", 190, 10, 20, 20))
        assert "bbox_in_bounds" in self.rules(scene)

    def test_six_class_predictions(self):
        e = ElementDescriptor(
            id="a", kind="patch", bbox=Rect(10, 10, 20, 20),
            classes=tuple(ClassPrediction(f"c{i}", 0.9 - i / 10) for i in range(6)),
        )
        assert "classes_max_5" in self.rules(self.scene(e))

    def test_unsorted_class_scores(self):
        e = ElementDescriptor(
            id="a", kind="patch", bbox=Rect(10, 10, 20, 20),
            classes=(ClassPrediction("x", 0.2), ClassPrediction("y", 0.9)),
        )
        assert "classes_sorted" in self.rules(self.scene(e))

    def test_score_out_of_range(self):
        e = ElementDescriptor(
            id="a", kind="patch", bbox=Rect(10, 10, 20, 20),
            classes=(ClassPrediction("x", 1.5),),
        )
        assert "class_score_range" in self.rules(self.scene(e))

    def test_unknown_joint_name(self):
        e = ElementDescriptor(
            id="a", kind="person", bbox=Rect(10, 10, 20, 20),
            pose=PoseDescriptor(joints={"tail": Keypoint(Point2(15, 15), 1.0)}),
        )
        violations = validate_descriptor(self.scene(e))
        assert any(v.rule == "joint_name_known" and "tail" in v.message for v in violations)

    def test_pose_on_non_person(self):
        e = ElementDescriptor(
            id="a", kind="object", bbox=Rect(10, 10, 20, 20),
            pose=PoseDescriptor(joints={"nose": Keypoint(Point2(15, 15), 1.0)}),
        )
        assert "pose_person_only" in self.rules(self.scene(e))

    def test_feature_dim_mismatch_names_layer(self):
        a = make_patch("a", 10, 10, 20, 20, features=(1.0, 2.0))
        b = make_patch("b", 60, 10, 20, 20, features=(1.0, 2.0, 3.0))
        violations = validate_descriptor(self.scene(a, b))
        assert any(v.rule == "feature_dim_consistent" and "conv5" in v.message for v in violations)

    def test_mirrored_features_share_dimension_rule(self):
        a = make_patch("a", 10, 10, 20, 20, features=(1.0, 2.0), mirrored=(1.0, 2.0, 3.0))
        violations = validate_descriptor(self.scene(a))
        assert any(v.rule == "feature_dim_consistent" for v in violations)

    def test_half_feature_dims(self):
        scene = ImageDescriptor(
            image_id="v", width=100.0, height=100.0,
            half_features={"conv1": HalfFeatures((1.0,), (1.0, 2.0))},
        )
        assert "half_feature_dims" in [v.rule for v in validate_descriptor(scene)]


def test_loaded_descriptor_always_validates_clean(tmp_path, uneven_scene):
    # load_descriptor runs the full validation; whatever it accepts is clean.
    out = tmp_path / "x.json"
    save_descriptor(uneven_scene, out)
    assert validate_descriptor(load_descriptor(out)) == []


def test_to_dict_from_dict_identity(people_scene):
    assert descriptor_from_dict(descriptor_to_dict(people_scene)) == people_scene
