import numpy as np
import pytest
from hypothesis import settings

from cascadeinv.experiments import builtin_coefficient, builtin_initial_data
from cascadeinv.grid import Grid1D

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid100():
    return Grid1D(100)


@pytest.fixture(scope="session")
def example1(grid100):
    d = builtin_coefficient("1", grid100)
    u0, v0 = builtin_initial_data("1", grid100)
    return grid100, d, u0, v0


@pytest.fixture(scope="session")
def example2(grid100):
    d = builtin_coefficient("2", grid100)
    u0, v0 = builtin_initial_data("2", grid100)
    return grid100, d, u0, v0


def smooth_direction(x, coeffs, shift=0.0):
    return shift + sum(c * np.sin((k + 1) * np.pi * x) for k, c in enumerate(coeffs))
