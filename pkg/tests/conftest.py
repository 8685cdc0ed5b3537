import numpy as np
import pytest

from qheis.extremals import ubar_field


@pytest.fixture(scope="session")
def ubar():
    return ubar_field()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def box_points(rng):
    """100 generic points with |coords| <= 2."""
    return rng.uniform(-2.0, 2.0, size=(100, 7))
