import numpy as np
import pytest

from src.cp_semigroup import example_tt
from src.inclusion import example2_system, from_cp
from src.linalg_core import Tolerance


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def ex2():
    return example2_system("E")


@pytest.fixture
def tt():
    return from_cp(example_tt(1.0), name="T")


@pytest.fixture
def rng():
    return np.random.default_rng(7)
