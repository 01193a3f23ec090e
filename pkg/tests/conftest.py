import numpy as np
import pytest
from hypothesis import settings

from poisson_lift import load_example

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

EXAMPLE_NAMES = ("su2_standard", "aff1_standard", "trivial_dual_rn", "pair_r4")


@pytest.fixture(scope="session")
def su2():
    return load_example("su2_standard")


@pytest.fixture(scope="session")
def aff1():
    return load_example("aff1_standard")


@pytest.fixture(scope="session")
def abelian():
    return load_example("trivial_dual_rn")


@pytest.fixture(scope="session")
def pair():
    return load_example("pair_r4")


@pytest.fixture(scope="session", params=EXAMPLE_NAMES)
def example(request):
    return load_example(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
