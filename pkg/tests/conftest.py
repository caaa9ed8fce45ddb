import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
