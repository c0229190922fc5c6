"""Shared fixtures for the fundsol test suites."""

import numpy as np
import pytest

from fundsol.config import RunConfig


@pytest.fixture
def fast_config():
    """Level-3 sphere rules: exact for radial data, ample for the smooth anisotropic cases."""
    return RunConfig(sphere_level=3, workers=1)


@pytest.fixture
def fine_config():
    return RunConfig(sphere_level=4, workers=1)


@pytest.fixture
def rng():
    return np.random.default_rng(RunConfig().seed)
