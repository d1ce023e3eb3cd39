"""Image files to schema-valid element descriptors."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .classes import class_predictions, load_label_map
from .config import DecodeError, ExtractionConfig
from .features import half_features, patch_features
from .proposals import propose_regions

IMAGE_SUFFIXES = frozenset({".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"})


def load_image(path: str | Path) -> np.ndarray:
    """Decode to float RGB in [0, 1]."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def build_descriptor(
    image_id: str,
    rgb: np.ndarray,
    cfg: ExtractionConfig,
    label_map: dict[str, str] | None = None,
) -> dict:
    if label_map is None:
        label_map = load_label_map()
    height, width = rgb.shape[:2]
    elements = []
    for index, (x, y, w, h) in enumerate(propose_regions(rgb, cfg)):
        crop = rgb[int(y):int(y + h), int(x):int(x + w)]
        features, mirrored = patch_features(crop, cfg)
        classes = class_predictions(features[cfg.layers[-1]], cfg, label_map)
        is_object = (
            classes[0][1] >= cfg.confidence_floor
            and w * h >= cfg.object_min_area_fraction * width * height
        )
        elements.append(
            {
                "id": f"e{index:03d}",
                "kind": "object" if is_object else "patch",
                "bbox": {"x": x, "y": y, "w": w, "h": h},
                "classes": [{"label": label, "score": score} for label, score in classes],
                "features": {layer: list(v) for layer, v in features.items()},
                "features_mirrored": {layer: list(v) for layer, v in mirrored.items()},
            }
        )
    return {
        "image_id": image_id,
        "width": float(width),
        "height": float(height),
        "half_features": {
            layer: {"left": list(hv["left"]), "right_mirrored": list(hv["right_mirrored"])}
            for layer, hv in half_features(rgb, cfg).items()
        },
        "elements": elements,
        # provenance block; downstream ignores unknown keys
        "extraction": {
            "feature_network": cfg.feature_network,
            "proposal_method": cfg.proposal_method,
            "detector_model": cfg.detector_model,
            "pose_model": cfg.pose_model,
            "input_size": cfg.input_size,
            "resize_policy": cfg.resize_policy,
        },
    }


def _write_json(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def extract(image_path: str | Path, cfg: ExtractionConfig, out_path: str | Path) -> dict:
    """Single image to descriptor file; nothing is written on failure."""
    image_path = Path(image_path)
    rgb = load_image(image_path)
    descriptor = build_descriptor(image_path.stem, rgb, cfg)
    _write_json(descriptor, Path(out_path))
    return descriptor


def batch_extract(image_dir: str | Path, cfg: ExtractionConfig, out_dir: str | Path) -> dict:
    """One descriptor per decodable image plus a manifest of failures.

    A corrupt file records a failure entry and the batch continues; the
    manifest carries no timestamps, so reruns are byte-identical.
    """
    image_dir, out_dir = Path(image_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    label_map = load_label_map()
    manifest: dict = {"descriptors": {}, "failures": {}}
    for path in sorted(image_dir.iterdir()):
        if not path.is_file() or path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            rgb = load_image(path)
            descriptor = build_descriptor(path.stem, rgb, cfg, label_map)
        except DecodeError as exc:
            manifest["failures"][path.name] = str(exc)
            continue
        _write_json(descriptor, out_dir / f"{path.stem}.json")
        manifest["descriptors"][path.stem] = f"{path.stem}.json"
    _write_json(manifest, out_dir / "extraction_manifest.json")
    return manifest
