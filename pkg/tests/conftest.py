import numpy as np
import pytest

from altseq import solve_finite


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def sol_n50():
    return solve_finite(50)


@pytest.fixture(scope="session")
def sol_n10():
    return solve_finite(10)


@pytest.fixture(scope="session")
def sol_n3():
    return solve_finite(3)
