import pytest

from bosonstar.solver import SolverConfig, solve_ground_state
from bosonstar.spectral_core import RadialGrid


@pytest.fixture(scope="session")
def ground_state():
    """The canonical ground state on the default desk grid"""
    return solve_ground_state(SolverConfig(RadialGrid(2048, 200.0), tol_residual=1e-10))


@pytest.fixture(scope="session")
def small_ground_state():
    """A grid small enough for dense n x n linear algebra"""
    return solve_ground_state(SolverConfig(RadialGrid(1024, 50.0), tol_residual=1e-10))
