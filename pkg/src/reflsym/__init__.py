"""Queryable interpretation models of reflectional symmetry in images."""

__version__ = "0.1.0"

from .config import SymmetryConfig, config_hash, load_config, save_config
from .descriptors import (
    ClassPrediction,
    ElementDescriptor,
    ImageDescriptor,
    PoseDescriptor,
    Violation,
    load_descriptor,
    save_descriptor,
    validate_descriptor,
)
from .geometry import Point2, Rect, Rotation3, SymmetryAxis
from .model import (
    InterpretationModel,
    SymmetryStats,
    build_model,
    load_model,
    save_model,
    symmetry_stats,
    symmetrical_objects_stats,
)
from .query import evaluate, parse_query, solve
from .similarity import TaxonomyGraph, bundled_taxonomy, load_taxonomy
from .symmetry import (
    CenteredElement,
    DivergenceRecord,
    PoseSymmetryReport,
    SymmetryPair,
)

__all__ = [
    "CenteredElement",
    "ClassPrediction",
    "DivergenceRecord",
    "ElementDescriptor",
    "ImageDescriptor",
    "InterpretationModel",
    "Point2",
    "PoseDescriptor",
    "PoseSymmetryReport",
    "Rect",
    "Rotation3",
    "SymmetryAxis",
    "SymmetryConfig",
    "SymmetryPair",
    "SymmetryStats",
    "TaxonomyGraph",
    "Violation",
    "build_model",
    "bundled_taxonomy",
    "config_hash",
    "evaluate",
    "load_config",
    "load_descriptor",
    "load_model",
    "load_taxonomy",
    "parse_query",
    "save_config",
    "save_descriptor",
    "save_model",
    "solve",
    "symmetrical_objects_stats",
    "symmetry_stats",
    "validate_descriptor",
]
