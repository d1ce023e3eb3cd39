"""Command line: images in, element descriptors out."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ExtractError, ExtractionConfig, load_config
from .extract import batch_extract, extract

EXIT_OK = 0
EXIT_ENVIRONMENT = 1
EXIT_DOMAIN = 2


def cmd_extract(args) -> int:
    cfg = load_config(args.config) if args.config else ExtractionConfig()
    target = Path(args.path)
    out_dir = Path(args.out)
    if target.is_dir():
        manifest = batch_extract(target, cfg, out_dir)
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        extract(target, cfg, out_dir / f"{target.stem}.json")
        manifest = {"descriptors": {target.stem: f"{target.stem}.json"}, "failures": {}}
    print(json.dumps(manifest, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refext",
        description="Extract element descriptors from images for symmetry analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write descriptor JSON for an image or directory")
    p.add_argument("path", help="image file or directory of images")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    p.set_defaults(func=cmd_extract)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ExtractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT


if __name__ == "__main__":
    sys.exit(main())
