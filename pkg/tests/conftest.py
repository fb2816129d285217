import numpy as np
import pytest

from finslerproj.metrics import (EuclideanMetric, RandersSpec, funk_ball,
                                 klein_metric, randers_metric)


@pytest.fixture(scope="session")
def eucl2():
    return EuclideanMetric(2)


@pytest.fixture(scope="session")
def klein2():
    return klein_metric(2)


@pytest.fixture(scope="session")
def klein3():
    return klein_metric(3)


@pytest.fixture(scope="session")
def ball2():
    return funk_ball(2)


@pytest.fixture(scope="session")
def randers_const():
    return randers_metric(RandersSpec(2, np.eye(2), np.array([0.5, 0.0])))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
