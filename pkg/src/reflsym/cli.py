"""Command-line surface.

Subcommands cover the whole pipeline: validate a descriptor, analyze it
into a model file, query or summarize models, emit SVG overlays, and run
the feature/training/evaluation harness.

Exit codes are uniform across commands: 0 on success, 1 for environment
problems (missing files, unreadable input, bad configuration), 2 for
domain errors (validation violations, query errors, learning errors).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, SymmetryConfig, config_hash, load_config
from .descriptors import (
    DescriptorError,
    ParseError,
    SchemaError,
    ValidationError,
    load_descriptor,
    validate_descriptor,
)
from .learning import (
    LearningError,
    cross_validate,
    join_examples,
    read_counts_csv,
    read_features_csv,
    read_labels_csv,
    save_report,
    save_trained_model,
    summary_line,
    train_classifier,
    train_regressor,
    write_features_csv,
    assemble_features,
)
from .model import (
    STATS_CSV_HEADER,
    build_model,
    load_model,
    save_model,
    stats_csv_row,
    symmetrical_objects_stats,
    symmetry_stats,
)
from .overlay import write_overlay
from .query import (
    QueryError,
    QuerySyntaxError,
    evaluate,
    format_solution,
    parse_query,
)
from .similarity import SimilarityError, bundled_taxonomy, load_taxonomy

EXIT_OK = 0
EXIT_ENVIRONMENT = 1
EXIT_DOMAIN = 2

MAX_WORKERS = 8


def _load_config_arg(path: str | None) -> SymmetryConfig:
    return load_config(path) if path else SymmetryConfig()


def _load_taxonomy_arg(path: str | None):
    return load_taxonomy(path) if path else bundled_taxonomy()


def _print_manifest(args_paths_in: list[str], out_paths: list[str], cfg: SymmetryConfig,
                    started: float) -> None:
    manifest = {
        "tool_version": __version__,
        "config_hash": config_hash(cfg),
        "inputs": args_paths_in,
        "outputs": out_paths,
        "wall_time_s": round(time.monotonic() - started, 3),
    }
    print(json.dumps(manifest, sort_keys=True))


def cmd_validate(args) -> int:
    descriptor = load_descriptor(args.descriptor)
    violations = validate_descriptor(descriptor)
    for v in violations:
        print(v)
    return EXIT_DOMAIN if violations else EXIT_OK


def cmd_analyze(args) -> int:
    started = time.monotonic()
    cfg = _load_config_arg(args.config)
    taxonomy = _load_taxonomy_arg(args.taxonomy)
    descriptor = load_descriptor(args.descriptor)
    model = build_model(descriptor, cfg, taxonomy)
    save_model(model, args.out)
    _print_manifest([args.descriptor], [args.out], cfg, started)
    return EXIT_OK


def cmd_query(args) -> int:
    model = load_model(args.model)
    queries = [args.query] if args.query else [line for line in sys.stdin if line.strip()]
    for text in queries:
        try:
            ast = parse_query(text)
        except QuerySyntaxError as exc:
            line = text.splitlines()[exc.line - 1] if text.splitlines() else ""
            print(f"syntax error: {exc}", file=sys.stderr)
            print(line.rstrip("\n"), file=sys.stderr)
            print(" " * (exc.col - 1) + "^", file=sys.stderr)
            return EXIT_DOMAIN
        result = evaluate(ast, model)
        for binding in result.solutions:
            print(format_solution(binding))
        footer = f"{len(result.solutions)} solution(s)"
        if result.truncated:
            footer += " (truncated)"
        print(footer)
    return EXIT_OK


def cmd_stats(args) -> int:
    def load(path: str):
        try:
            return load_model(path)
        except (OSError, DescriptorError) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(args.models))) as pool:
        loaded = list(pool.map(load, args.models))

    print(STATS_CSV_HEADER)
    rows = 0
    for path, model in zip(args.models, loaded):
        if isinstance(model, Exception):
            print(f"warning: skipping {path}: {model}", file=sys.stderr)
            continue
        scope_stats = (
            symmetry_stats(model) if args.scope == "patches"
            else symmetrical_objects_stats(model)
        )
        print(stats_csv_row(model.image_id, scope_stats))
        rows += 1
    return EXIT_OK if rows else EXIT_ENVIRONMENT


def cmd_overlay(args) -> int:
    model = load_model(args.model)
    write_overlay(model, args.out, image_ref=args.image)
    return EXIT_OK


def cmd_features(args) -> int:
    cfg = _load_config_arg(args.config)
    taxonomy = _load_taxonomy_arg(args.taxonomy)

    with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(args.descriptors))) as pool:
        descriptors = list(pool.map(load_descriptor, args.descriptors))

    models = {}
    if args.models:
        for path in args.models:
            model = load_model(path)
            models[model.image_id] = model

    features = []
    for d in descriptors:
        model = models.get(d.image_id)
        if model is None:
            model = build_model(d, cfg, taxonomy)
        features.append(assemble_features(d, model))
    write_features_csv(features, args.out)
    print(f"wrote {len(features)} feature rows to {args.out}")
    return EXIT_OK


def _load_examples(args):
    features = read_features_csv(args.feature_file)
    labels = read_labels_csv(args.labels)
    counts = read_counts_csv(args.counts) if args.counts else None
    return join_examples(features, labels, counts)


def cmd_train(args) -> int:
    examples = _load_examples(args)
    classifier = train_classifier(examples, args.features, args.seed)
    regressor = train_regressor(examples, args.features, args.seed)
    classifier_path = f"{args.out}.classifier.json"
    regressor_path = f"{args.out}.regressor.json"
    save_trained_model(classifier, classifier_path)
    save_trained_model(regressor, regressor_path)
    print(f"trained on {len(examples)} examples ({args.features})")
    print(f"wrote {classifier_path}")
    print(f"wrote {regressor_path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    examples = _load_examples(args)
    report = cross_validate(examples, args.features, k=args.folds, seed=args.seed)
    if args.out:
        save_report(report, args.out)
    print(summary_line(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflsym",
        description="Queryable interpretation models of reflectional symmetry in images.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a descriptor file against all invariants")
    p.add_argument("descriptor")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="build an interpretation model from a descriptor")
    p.add_argument("descriptor")
    p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    p.add_argument("--taxonomy", help="taxonomy file (bundled mini-taxonomy when omitted)")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("query", help="run conjunctive queries against a model file")
    p.add_argument("model")
    p.add_argument("query", nargs="?", help="query text; reads lines from stdin when omitted")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="print per-image symmetry stats as CSV")
    p.add_argument("models", nargs="+")
    p.add_argument("--scope", choices=["patches", "objects"], default="patches")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("overlay", help="render a model to an SVG overlay")
    p.add_argument("model")
    p.add_argument("--out", required=True)
    p.add_argument("--image", help="optional background image reference")
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("features", help="assemble the feature CSV for learning")
    p.add_argument("descriptors", nargs="+")
    p.add_argument("--models", nargs="*", help="prebuilt model files matched by image id")
    p.add_argument("--config")
    p.add_argument("--taxonomy")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    for name, func in (("train", cmd_train), ("eval", cmd_eval)):
        p = sub.add_parser(name, help=f"{name} the classifier and regressor")
        p.add_argument("--feature-file", required=True)
        p.add_argument("--labels", required=True)
        p.add_argument("--counts", help="optional per-class response counts CSV")
        p.add_argument("--features", choices=["fs1", "fs1+2", "fs1+2+3"], default="fs1+2+3")
        p.add_argument("--seed", type=int, default=0)
        if name == "train":
            p.add_argument("--out", required=True, help="output path prefix")
        else:
            p.add_argument("--folds", type=int, default=5)
            p.add_argument("--out", help="optional report JSON path")
        p.set_defaults(func=func)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_DOMAIN
    except (QueryError, SimilarityError, LearningError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ParseError, SchemaError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT


if __name__ == "__main__":
    sys.exit(main())
