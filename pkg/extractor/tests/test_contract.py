"""Cross-component contract: emitted descriptors must satisfy the
downstream engine, reached only through its CLI and file formats."""

import csv
import json
import subprocess

import numpy as np

from imagegen import REFLSYM, save_png, shapes_array
from refext.cli import EXIT_OK, main
from refext.features import cosine

FS1_FLOOR = 0.99


def run_reflsym(*argv):
    return subprocess.run(REFLSYM + list(argv), capture_output=True, text=True)


def test_s1_descriptors_validate_downstream(tmp_path, capsys):
    images = tmp_path / "images"
    images.mkdir()
    for i in range(10):
        save_png(shapes_array(100 + i), images / f"sample_{i:02d}.png")
    out = tmp_path / "descriptors"
    assert main(["extract", str(images), "--out", str(out)]) == EXIT_OK
    capsys.readouterr()

    descriptors = sorted(out.glob("sample_*.json"))
    assert len(descriptors) == 10
    for path in descriptors:
        proc = run_reflsym("validate", str(path))
        assert proc.returncode == 0, f"{path.name}: {proc.stderr}"
    print("[PASS] S1a contract: 10/10 emitted descriptors validate with exit 0")


def test_s1_mirrored_image_fs1(tmp_path, capsys):
    base = shapes_array(999, height=80, width=100)
    mirrored = np.concatenate([base, base[:, ::-1]], axis=1)
    save_png(mirrored, tmp_path / "mirror.png")
    out = tmp_path / "out"
    assert main(["extract", str(tmp_path / "mirror.png"), "--out", str(out)]) == EXIT_OK
    capsys.readouterr()

    descriptor = json.loads((out / "mirror.json").read_text())
    for layer, halves in descriptor["half_features"].items():
        assert cosine(halves["left"], halves["right_mirrored"]) >= FS1_FLOOR, layer

    # the same five values as the downstream feature assembler computes them
    feature_csv = tmp_path / "features.csv"
    proc = run_reflsym("features", str(out / "mirror.json"), "--out", str(feature_csv))
    assert proc.returncode == 0, proc.stderr
    lines = feature_csv.read_text().splitlines()
    rows = list(csv.DictReader(lines[1:]))  # first line is the layout magic
    assert len(rows) == 1
    fs1 = [float(rows[0][f"fs1_{i}"]) for i in range(5)]
    assert all(v >= FS1_FLOOR for v in fs1), fs1
    print(f"[PASS] S1b contract: mirrored-image fs1 = {[f'{v:.4f}' for v in fs1]}")
