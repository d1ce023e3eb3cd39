"""Command-line surface: flows, exit codes, determinism."""

import json
import random
import xml.etree.ElementTree as ET

import pytest

from reflsym.cli import EXIT_DOMAIN, EXIT_ENVIRONMENT, EXIT_OK, main

from conftest import FIXTURES

PERFECT = str(FIXTURES / "perfect_scene.json")
PEOPLE = str(FIXTURES / "people_scene.json")
EMPTY = str(FIXTURES / "empty_scene.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def analyzed(tmp_path, capsys):
    out = tmp_path / "perfect.model.json"
    code, _, _ = run(capsys, "analyze", PERFECT, "--out", str(out))
    assert code == EXIT_OK
    return out


class TestValidate:
    def test_valid_fixture(self, capsys):
        code, out, _ = run(capsys, "validate", PERFECT)
        assert code == EXIT_OK

    def test_bad_bbox(self, tmp_path, capsys):
        raw = json.loads(FIXTURES.joinpath("perfect_scene.json").read_text())
        raw["elements"][0]["bbox"] = {"x": -5, "y": 0, "w": 40, "h": 40}
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(raw), encoding="utf-8")
        code, out, err = run(capsys, "validate", str(bad))
        assert code == EXIT_DOMAIN
        assert len((out + err).strip().splitlines()) >= 1

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "validate", "/nonexistent/file.json")
        assert code == EXIT_ENVIRONMENT

    def test_unparsable_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{ not json", encoding="utf-8")
        code, _, _ = run(capsys, "validate", str(bad))
        assert code == EXIT_ENVIRONMENT


class TestAnalyze:
    def test_model_written_and_manifest_printed(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        code, stdout, _ = run(capsys, "analyze", PERFECT, "--out", str(out))
        assert code == EXIT_OK
        manifest = json.loads(stdout)
        assert str(out) in manifest["outputs"]
        assert manifest["config_hash"]
        model = json.loads(out.read_text(encoding="utf-8"))
        assert all(p["divergence"]["mean"] == 0.0 for p in model["pairs"])

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(capsys, "analyze", PERFECT, "--out", str(a))[0] == EXIT_OK
        assert run(capsys, "analyze", PERFECT, "--out", str(b))[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_corrupt_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"divergence_treshold": 0.2}', encoding="utf-8")
        out = tmp_path / "m.json"
        code, _, err = run(capsys, "analyze", PERFECT, "--config", str(cfg), "--out", str(out))
        assert code == EXIT_ENVIRONMENT
        assert "divergence_treshold" in err

    def test_custom_config_respected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"axis_x_fraction": 0.25}', encoding="utf-8")
        out = tmp_path / "m.json"
        code, _, _ = run(capsys, "analyze", PERFECT, "--config", str(cfg), "--out", str(out))
        assert code == EXIT_OK
        model = json.loads(out.read_text(encoding="utf-8"))
        assert model["axis"]["x"] == pytest.approx(100.0)


class TestQuery:
    def test_enumeration_with_footer(self, analyzed, capsys):
        code, out, _ = run(capsys, "query", str(analyzed), "symmetrical_element(E)")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert len(lines) == 4  # 3 solutions + count footer
        assert lines[-1] == "3 solution(s)"

    def test_stats_query_binds_four_values(self, analyzed, capsys):
        code, out, _ = run(capsys, "query", str(analyzed), "symmetry_stats(NP, NSP, MD, MS)")
        assert code == EXIT_OK
        first = out.strip().splitlines()[0]
        assert first.count("=") == 4
        assert "NP = 4" in first

    def test_syntax_error_shows_caret(self, analyzed, capsys):
        code, _, err = run(capsys, "query", str(analyzed), "symmetrical_element(")
        assert code == EXIT_DOMAIN
        assert "^" in err

    def test_unknown_predicate(self, analyzed, capsys):
        code, _, _ = run(capsys, "query", str(analyzed), "frobnicate(X)")
        assert code == EXIT_DOMAIN

    def test_stdin_mode(self, analyzed, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("symmetrical_element(E)\n\n"))
        code, out, _ = run(capsys, "query", str(analyzed))
        assert code == EXIT_OK
        assert "3 solution(s)" in out


class TestStats:
    def test_rows_in_input_order(self, tmp_path, capsys):
        m1 = tmp_path / "perfect.json"
        m2 = tmp_path / "empty.json"
        assert run(capsys, "analyze", PERFECT, "--out", str(m1))[0] == EXIT_OK
        assert run(capsys, "analyze", EMPTY, "--out", str(m2))[0] == EXIT_OK
        code, out, _ = run(capsys, "stats", str(m2), str(m1))
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "image_id,NP,NSP,rel_sym,MD,MS"
        assert lines[1].startswith("empty_scene,0,0,0.0")
        assert lines[2].startswith("perfect_scene,4,4,1.0")

    def test_objects_scope(self, tmp_path, capsys):
        m = tmp_path / "people.json"
        assert run(capsys, "analyze", PEOPLE, "--out", str(m))[0] == EXIT_OK
        code, out, _ = run(capsys, "stats", str(m), "--scope", "objects")
        assert code == EXIT_OK
        row = out.strip().splitlines()[1]
        assert row.startswith("people_scene,4,3,0.75")

    def test_skip_and_warn(self, tmp_path, analyzed, capsys):
        missing = tmp_path / "missing.json"
        code, out, err = run(capsys, "stats", str(missing), str(analyzed))
        assert code == EXIT_OK
        assert len(out.strip().splitlines()) == 2  # header + one row
        assert "missing.json" in err

    def test_no_rows_at_all(self, tmp_path, capsys):
        code, _, _ = run(capsys, "stats", str(tmp_path / "nope.json"))
        assert code == EXIT_ENVIRONMENT


class TestOverlay:
    def test_well_formed_svg(self, tmp_path, analyzed, capsys):
        out = tmp_path / "overlay.svg"
        code, _, _ = run(capsys, "overlay", str(analyzed), "--out", str(out))
        assert code == EXIT_OK
        root = ET.fromstring(out.read_text(encoding="utf-8"))
        assert root.tag.endswith("svg")
        assert root.get("viewBox") == "0 0 400 300"

    def test_axis_and_tooltips(self, tmp_path, analyzed, capsys):
        out = tmp_path / "overlay.svg"
        run(capsys, "overlay", str(analyzed), "--out", str(out))
        text = out.read_text(encoding="utf-8")
        assert "stroke-dasharray" in text
        assert "<title>" in text and "pa_l" in text

    def test_background_reference(self, tmp_path, analyzed, capsys):
        out = tmp_path / "overlay.svg"
        run(capsys, "overlay", str(analyzed), "--out", str(out), "--image", "photo.jpg")
        assert 'href="photo.jpg"' in out.read_text(encoding="utf-8")

    def test_unwritable_path(self, analyzed, capsys):
        code, _, _ = run(capsys, "overlay", str(analyzed), "--out", "/nonexistent/dir/o.svg")
        assert code == EXIT_ENVIRONMENT


def write_learning_inputs(tmp_path, capsys, n=24):
    """Feature CSV + labels for a separable two-class synthetic set."""
    from reflsym.learning import FeatureVector, write_features_csv

    rng = random.Random(5)
    features, label_rows = [], []
    for i in range(n):
        cls = "symmetric" if i % 2 else "not_symmetric"
        base = 0.8 if i % 2 else 0.2
        fs1 = tuple(base + rng.uniform(-0.05, 0.05) for _ in range(5))
        features.append(FeatureVector(image_id=f"img{i}", fs1=fs1, fs2=None, fs3=None))
        label_rows.append(f"img{i},{cls},{base},0.0")
    feature_file = tmp_path / "features.csv"
    write_features_csv(features, feature_file)
    labels = tmp_path / "labels.csv"
    labels.write_text(
        "image_id,class,mean_symmetry,response_variance\n" + "\n".join(label_rows) + "\n",
        encoding="utf-8",
    )
    return feature_file, labels


class TestFeaturesCommand:
    def test_assemble_from_descriptors(self, tmp_path, capsys):
        out = tmp_path / "features.csv"
        code, _, _ = run(capsys, "features", PERFECT, PEOPLE, "--out", str(out))
        assert code == EXIT_OK
        from reflsym.learning import read_features_csv

        got = read_features_csv(out)
        assert [f.image_id for f in got] == ["perfect_scene", "people_scene"]
        assert all(f.fs1 is not None and f.fs2 is not None and f.fs3 is not None for f in got)

    def test_prebuilt_models_matched_by_image_id(self, tmp_path, analyzed, capsys):
        out = tmp_path / "features.csv"
        code, _, _ = run(
            capsys, "features", PERFECT, "--models", str(analyzed), "--out", str(out)
        )
        assert code == EXIT_OK


class TestTrainEval:
    def test_train_writes_both_models(self, tmp_path, capsys):
        feature_file, labels = write_learning_inputs(tmp_path, capsys)
        prefix = tmp_path / "fit"
        code, _, _ = run(
            capsys,
            "train",
            "--feature-file", str(feature_file),
            "--labels", str(labels),
            "--features", "fs1",
            "--out", str(prefix),
        )
        assert code == EXIT_OK
        clf = json.loads((tmp_path / "fit.classifier.json").read_text(encoding="utf-8"))
        assert clf["feature_mask"] == "fs1"
        assert (tmp_path / "fit.regressor.json").exists()

    def test_eval_separable_set(self, tmp_path, capsys):
        feature_file, labels = write_learning_inputs(tmp_path, capsys)
        report_path = tmp_path / "report.json"
        code, out, _ = run(
            capsys,
            "eval",
            "--feature-file", str(feature_file),
            "--labels", str(labels),
            "--features", "fs1",
            "--folds", "4",
            "--out", str(report_path),
        )
        assert code == EXIT_OK
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert report["classification_accuracy"] == 1.0
        assert "CA" in out

    def test_eval_deterministic(self, tmp_path, capsys):
        feature_file, labels = write_learning_inputs(tmp_path, capsys)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            code, _, _ = run(
                capsys,
                "eval",
                "--feature-file", str(feature_file),
                "--labels", str(labels),
                "--features", "fs1",
                "--seed", "3",
                "--out", str(path),
            )
            assert code == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_mask_needing_absent_set_fails_cleanly(self, tmp_path, capsys):
        feature_file, labels = write_learning_inputs(tmp_path, capsys)
        code, _, _ = run(
            capsys,
            "eval",
            "--feature-file", str(feature_file),
            "--labels", str(labels),
            "--features", "fs1+2",
        )
        assert code == EXIT_DOMAIN
