import numpy as np
import pytest

from bosetrap.potentials import make_gaussian_potential


@pytest.fixture(scope="session")
def gaussian_v():
    return make_gaussian_potential(1.0, 1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
