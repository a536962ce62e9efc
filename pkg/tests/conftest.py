import numpy as np
import pytest

from geopol import models


@pytest.fixture
def flat2():
    return models.Euclidean(2)


@pytest.fixture
def sphere():
    return models.ConstantCurvature(2, 1.0)


@pytest.fixture
def hyperbolic():
    return models.ConstantCurvature(2, -1.0)


@pytest.fixture
def torus():
    return models.SurfaceOfRevolution(models.torus_profile(3.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
