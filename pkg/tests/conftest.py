from pathlib import Path

import pytest

from reflsym import SymmetryConfig, bundled_taxonomy, load_descriptor
from reflsym.descriptors import ClassPrediction, ElementDescriptor, ImageDescriptor
from reflsym.geometry import Rect

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def taxonomy():
    return bundled_taxonomy()


@pytest.fixture
def default_config():
    return SymmetryConfig()


@pytest.fixture
def perfect_scene():
    return load_descriptor(FIXTURES / "perfect_scene.json")


@pytest.fixture
def uneven_scene():
    return load_descriptor(FIXTURES / "uneven_scene.json")


@pytest.fixture
def people_scene():
    return load_descriptor(FIXTURES / "people_scene.json")


@pytest.fixture
def empty_scene():
    return load_descriptor(FIXTURES / "empty_scene.json")


def make_patch(eid, x, y, w, h, features=None, mirrored=None, label="patch"):
    """Bare patch element for synthetic scenes."""
    return ElementDescriptor(
        id=eid,
        kind="patch",
        bbox=Rect(x, y, w, h),
        classes=(ClassPrediction(label, 0.9),),
        features={} if features is None else {"conv5": tuple(features)},
        features_mirrored=None if mirrored is None else {"conv5": tuple(mirrored)},
    )


def make_scene(image_id, width, height, elements, half_features=None):
    return ImageDescriptor(
        image_id=image_id,
        width=width,
        height=height,
        elements=tuple(elements),
        half_features=half_features or {},
    )
