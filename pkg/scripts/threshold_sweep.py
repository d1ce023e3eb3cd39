#!/usr/bin/env python3
"""Sweep the divergence threshold and watch classifications flip.

Rebuilds each fixture scene at a range of thresholds and prints one line
per (scene, threshold): element count, symmetric count, and the ratio.
Useful for picking a threshold by eye against known scenes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from reflsym.config import SymmetryConfig
from reflsym.descriptors import load_descriptor
from reflsym.model import build_model, symmetry_stats, symmetrical_objects_stats
from reflsym.similarity import bundled_taxonomy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixtures", default="tests/fixtures")
    parser.add_argument("--start", type=float, default=0.02)
    parser.add_argument("--stop", type=float, default=0.30)
    parser.add_argument("--step", type=float, default=0.02)
    parser.add_argument("--scope", choices=["patches", "objects"], default="patches")
    args = parser.parse_args()

    stats_of = symmetry_stats if args.scope == "patches" else symmetrical_objects_stats
    taxonomy = bundled_taxonomy()
    descriptors = [load_descriptor(p) for p in sorted(Path(args.fixtures).glob("*.json"))]
    if not descriptors:
        print("no descriptors found", file=sys.stderr)
        return 1

    print(f"{'scene':<16} {'threshold':>9} {'N':>4} {'sym':>4} {'rel':>6}")
    base = SymmetryConfig()
    threshold = args.start
    while threshold <= args.stop + 1e-9:
        cfg = replace(base, divergence_threshold=round(threshold, 4))
        for d in descriptors:
            s = stats_of(build_model(d, cfg, taxonomy))
            print(
                f"{d.image_id:<16} {cfg.divergence_threshold:>9.2f} "
                f"{s.num_elements:>4} {s.num_symmetric:>4} {s.relative_symmetry:>6.3f}"
            )
        threshold += args.step
    return 0


if __name__ == "__main__":
    sys.exit(main())
