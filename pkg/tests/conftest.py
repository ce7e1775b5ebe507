import numpy as np
import pytest
from scipy.special import erf

from contraction import Params
from picard import solve_phi, truncation_bound
from shooting import ShootingOptions

# enough RK4 steps for 1e-10 agreement on the default truncation, at a fifth of the cost
FAST_STEPS = 4000


@pytest.fixture(scope="session")
def classical():
    """Picard solution at delta = gamma = 0 (the classical error function)"""
    return solve_phi(Params(0.0, 0.0))


@pytest.fixture(scope="session")
def inside():
    """Picard solution at (0.1, 0.1), well inside the region"""
    return solve_phi(Params(0.1, 0.1))


@pytest.fixture
def fast_shooting():
    def make(p: Params) -> ShootingOptions:
        return ShootingOptions(x_max=truncation_bound(p), step_count=FAST_STEPS)
    return make


@pytest.fixture
def erf_oracle():
    return lambda x: erf(np.asarray(x, dtype=float))
