"""
Test configuration and fixtures
"""

import json
import logging

import pytest

from ametric_lab.ametric_core import example_space
from ametric_lab.convexity import weighted_mean_structure
from ametric_lab.logging_config import PACKAGE_LOGGER
from ametric_lab.maps import linear_map
from ametric_lab.sampling import GridSampler, PointSampler
from ametric_lab.schedules import constant_schedule


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo configure_logging so tests stay independent"""
    yield
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.handlers.clear()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def space3():
    """Classical example space with t=3 on the real line"""
    return example_space(3, 1)


@pytest.fixture
def sampler():
    """Seeded sampler on [-10, 10] that always includes the origin"""
    return PointSampler(dim=1, seed=7, anchors=((0.0,),))


@pytest.fixture
def dyadic_grid():
    """Quarter-step grid on [-2, 3] containing every shipped fixed point"""
    return GridSampler(dim=1, values=tuple(i / 4.0 for i in range(-8, 13)))


@pytest.fixture
def half_map():
    """f(x) = x/2 with fixed point 0"""
    return linear_map(0.5, 1)


@pytest.fixture
def mean3():
    return weighted_mean_structure(3, 1)


@pytest.fixture
def half_schedule():
    return constant_schedule(3, 0.5)


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict to a JSON file and return its path"""

    def write(data, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
