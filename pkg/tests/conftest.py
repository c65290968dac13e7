"""Shared fixtures for the geo-sublinear test suite."""

import numpy as np
import pytest

from src.models import PointSet, SolverConfig
from src.utils import RngStream
from src.core import generate


@pytest.fixture
def rng() -> RngStream:
    return RngStream(7)


@pytest.fixture
def config() -> SolverConfig:
    """Single-threaded configuration so runs are reproducible in the test process."""
    config = SolverConfig()
    config.runtime.threads = 1
    return config


@pytest.fixture
def square() -> PointSet:
    return PointSet(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]))


@pytest.fixture
def gaussian_cloud() -> PointSet:
    generator = np.random.default_rng(3)
    return PointSet(generator.normal(size=(200, 3)))


@pytest.fixture
def planted_instance():
    """Planted-outliers instance: 200 points in R^3, 5% outliers."""
    return generate('planted-outliers', {'n': 200, 'd': 3, 'gamma': 0.05}, RngStream(11))
