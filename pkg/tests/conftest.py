import numpy as np
import pytest

import selfcontract as sc


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def plane():
    return sc.EuclideanSpace(2)


@pytest.fixture
def spider3():
    return sc.SpiderSpace(3)


@pytest.fixture
def book2():
    return sc.BookSpace(2)


@pytest.fixture
def hyperbolic():
    return sc.HyperbolicPlane()


@pytest.fixture
def small_tree():
    return sc.load_tree_file(
        """
        edge a b 1.0
        edge b c 2.0
        edge b d 0.5
        edge d e 1.5
        """
    )


def random_point_pairs(space, rng, n, scale=1.5):
    for _ in range(n):
        yield space.random_point(rng, scale), space.random_point(rng, scale)
