import numpy as np
import pytest

from roughwell.grid import Grid
from roughwell.potentials import PotentialProfile
from roughwell.spectral import solve_bound_states


@pytest.fixture(scope="session")
def grid3():
    return Grid(3, 32, 4.0)


@pytest.fixture(scope="session")
def grid3_mid():
    return Grid(3, 64, 8.0)


@pytest.fixture(scope="session")
def grid1():
    return Grid(1, 128, 12.0)


@pytest.fixture(scope="session")
def well10():
    return PotentialProfile("gaussian_well", 10.0, 1.0)


@pytest.fixture(scope="session")
def well25():
    return PotentialProfile("gaussian_well", 25.0, 1.0)


@pytest.fixture(scope="session")
def basis10(grid3, well10):
    return solve_bound_states(well10, grid3, k_max=2, tol=1e-7)


@pytest.fixture(scope="session")
def basis10_mid(grid3_mid, well10):
    return solve_bound_states(well10, grid3_mid, k_max=1, tol=1e-7)


@pytest.fixture(scope="session")
def basis25(grid3, well25):
    return solve_bound_states(well25, grid3, k_max=2, tol=1e-6)


@pytest.fixture(scope="session")
def basis25_mid(grid3_mid, well25):
    return solve_bound_states(well25, grid3_mid, k_max=2, tol=1e-7)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
