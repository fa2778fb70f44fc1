import numpy as np
import pytest

from bosonstar.energetics import (RescaleParams, ResolutionError, energy_breakdown, energy_parts,
    equation_residual, kato_lower_bound, minimization_functional, rescale_to_canonical, virial_report)
from bosonstar.miscellaneous import seeded
from bosonstar.solver import SolverConfig, solve_ground_state
from bosonstar.spectral_core import (ConfigError, DegenerateFieldError, RadialField, RadialGrid,
    norm, quadrature_3d)


def gaussian(grid, width=1.0):
    return RadialField(grid, np.exp(-grid.r**2/(2*width**2)))


def test_gaussian_energies():
    grid = RadialGrid(4096, 80.0)
    energy = energy_breakdown(gaussian(grid))
    assert energy.T == pytest.approx(2*np.pi, rel=1e-6)
    assert energy.M == pytest.approx(np.pi**1.5, rel=1e-10)
    assert energy.D == pytest.approx(np.sqrt(2)*np.pi**2.5, rel=1e-8)
    assert energy.I == pytest.approx(np.sqrt(2), rel=1e-6)


@pytest.mark.parametrize("width", [0.5, 1.5])
@pytest.mark.parametrize("amplitude", [0.3, 4.0])
def test_scale_invariance(width, amplitude):
    grid = RadialGrid(4096, 80.0)
    I = minimization_functional(amplitude*gaussian(grid, width))
    assert I == pytest.approx(minimization_functional(gaussian(grid)), rel=1e-6)


def test_homogeneity():
    grid = RadialGrid(512, 20.0)
    u = RadialField(grid, np.exp(-grid.r)*(1 + np.cos(grid.r)))
    T, M, D = energy_parts(u)
    T2, M2, D2 = energy_parts(3*u)
    assert (T2, M2, D2) == pytest.approx((9*T, 9*M, 81*D), rel=1e-12)


def test_zero_field():
    grid = RadialGrid(64, 8.0)
    zero = RadialField(grid, np.zeros(grid.n))
    assert energy_parts(zero) == (0.0, 0.0, 0.0)
    with pytest.raises(DegenerateFieldError):
        energy_breakdown(zero)
    with pytest.raises(DegenerateFieldError):
        equation_residual(zero)


def test_kato_bound():
    grid = RadialGrid(1024, 40.0)
    assert kato_lower_bound() == 2/np.pi
    with seeded(0) as random:
        for _ in range(100):
            widths = random.uniform(0.5, 3.0, size=3)
            coefficients = random.randn(3)
            u = RadialField(grid, sum(c*np.exp(-grid.r**2/(2*w**2))
                                      for c, w in zip(coefficients, widths)))
            energy = energy_breakdown(u)
            assert energy.D > 0
            assert energy.I >= kato_lower_bound() - 1e-3


def test_rescale_params():
    for key, kwargs in (("kappa", dict(kappa=0)), ("lambda", dict(lam=-1))):
        with pytest.raises(ConfigError) as excinfo:
            RescaleParams(**kwargs)
        assert excinfo.value.key == key


def test_rescale_identity_and_resolution():
    grid = RadialGrid(1024, 40.0)
    u = gaussian(grid, 2.0)
    assert rescale_to_canonical(u, RescaleParams()) is u
    with pytest.raises(ResolutionError):
        rescale_to_canonical(u, RescaleParams(lam=1000.0))


def test_rescale_mass():
    grid = RadialGrid(2047, 40.0)
    u = gaussian(grid, 2.0)
    # lambda = 1/2 reads u at the nodes 2 r_j
    v = rescale_to_canonical(u, RescaleParams(kappa=3.0, lam=0.5))
    assert norm(v)**2 == pytest.approx(3*norm(u)**2, rel=1e-6)
    w = rescale_to_canonical(u, RescaleParams(kappa=3.0, lam=2.0))
    assert norm(w)**2 == pytest.approx(3*norm(u)**2, rel=1e-4)


@pytest.mark.parametrize("mu, width", [(0.5, 2.0), (2.0, 0.5)])
def test_rescale_solution(ground_state, mu, width):
    grid = ground_state.Q.grid
    Q = ground_state.Q
    u = solve_ground_state(SolverConfig(grid, mu=mu, init_width=width, tol_residual=1e-10)).Q
    rho = equation_residual(u, mu=mu)
    assert rho <= 2e-10

    resampled = rescale_to_canonical(u, RescaleParams(lam=mu), polish=False)
    assert equation_residual(resampled) > 2*rho
    v = rescale_to_canonical(u, RescaleParams(lam=mu))
    assert equation_residual(v) <= 2*rho
    assert norm(v - Q) < 1e-6*norm(Q)

    kappa = 3.0
    scaled = u*kappa**-0.5
    assert equation_residual(scaled, mu=mu, kappa=kappa) == pytest.approx(rho, rel=1e-3)
    w = rescale_to_canonical(scaled, RescaleParams(kappa=kappa, lam=mu))
    assert equation_residual(w) <= 2*rho
    assert norm(w - v) < 1e-7*norm(v)


def test_virial_gaussian():
    grid = RadialGrid(7999, 8.0)
    virial = virial_report(gaussian(grid))
    expected = RadialField(grid, -2*np.pi*np.exp(-grid.r**2))
    assert norm(virial.newton_lhs - expected) < 1e-6*norm(expected)
    assert np.all(virial.newton_lhs.values <= 0)
    assert virial.difference_discrepancy < 1e-3
    assert virial.lhs == pytest.approx(virial.interaction)
    assert virial_report(gaussian(grid), E=1.0).lhs < virial.lhs


def test_virial_zero_field():
    grid = RadialGrid(64, 8.0)
    virial = virial_report(RadialField(grid, np.zeros(grid.n)), E=0.7)
    assert virial.lhs == 0
    assert virial.difference_discrepancy == 0


def test_virial_ground_state(ground_state):
    virial = virial_report(ground_state.Q)
    M = quadrature_3d(ground_state.Q.abs2())
    assert abs(virial.interaction + M)/M < 1e-4
    assert np.max(virial.newton_lhs.values) <= 1e-8
