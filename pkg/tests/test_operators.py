import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf

from bosonstar.miscellaneous import seeded
from bosonstar.operators import (KATO_CONSTANT, DispersionParams, apply_multiplier, hardy_kato_check,
    hartree_term, kinetic_energy, multipole_sweep, newton_potential, outer_sweep, poisson_kernel_realspace,
    poisson_semigroup, radial_convolution, resolvent, sqrt_laplacian)
from bosonstar.spectral_core import (ConfigError, DegenerateFieldError, GridMismatchError,
    NonFiniteError, RadialField,
    RadialGrid, SpectralField, forward_transform, norm, origin_value, quadrature_3d)


def unit_ball(grid):
    values = np.where(grid.r < 1, 1.0, 0.0)
    values[np.isclose(grid.r, 1.0)] = 0.5
    return RadialField(grid, values)


def test_dispersion_params():
    assert DispersionParams().m == 0
    for key, kwargs in (("m", dict(m=-1)), ("tau", dict(tau=0)), ("t", dict(t=-1))):
        with pytest.raises(ConfigError) as excinfo:
            DispersionParams(**kwargs)
        assert excinfo.value.key == key
    assert DispersionParams(m=3.0).dispersion(4.0) == 5.0


@pytest.mark.parametrize("key, apply", [
    ("m", lambda u: sqrt_laplacian(u, -1.0)),
    ("tau", lambda u: resolvent(u, tau=0.0)),
    ("m", lambda u: resolvent(u, m=-0.5)),
    ("t", lambda u: poisson_semigroup(u, -1.0)),
])
def test_multiplier_validation(key, apply):
    grid = RadialGrid(64, 8.0)
    with pytest.raises(ConfigError) as excinfo:
        apply(RadialField(grid, np.exp(-grid.r**2)))
    assert excinfo.value.key == key


def test_multipliers_map_real_to_real():
    grid = RadialGrid(500, 20.0)
    with seeded(3) as random:
        u = RadialField(grid, random.randn(grid.n))
        w = RadialField(grid, random.randn(grid.n))
    for apply in (sqrt_laplacian, resolvent, lambda f: sqrt_laplacian(f, 1.0),
                  lambda f: resolvent(f, 2.0, 1.0), lambda f: poisson_semigroup(f, 0.5)):
        image = apply(u)
        assert not image.is_complex
        combined = apply(u + 1j*w)
        assert np.max(np.abs(combined.real.values - image.values)) < 1e-12*np.max(np.abs(image.values))


def test_identity_multiplier():
    grid = RadialGrid(300, 10.0)
    u = RadialField(grid, np.exp(-grid.r**2))
    assert norm(apply_multiplier(u, lambda xi: np.ones_like(xi)) - u) < 1e-13*norm(u)
    with pytest.raises(NonFiniteError):
        apply_multiplier(u, lambda xi: np.where(xi > 1, np.nan, 1.0))


def test_sqrt_laplacian_of_gaussian():
    grid = RadialGrid(2048, 40.0)
    u = RadialField(grid, np.exp(-grid.r**2/2))
    assert origin_value(sqrt_laplacian(u)) == pytest.approx(4/np.sqrt(2*np.pi), abs=1e-6)
    assert kinetic_energy(u) == pytest.approx(2*np.pi, rel=1e-5)
    recovered = apply_multiplier(resolvent(u), lambda xi: xi + 1)
    assert norm(recovered - u) < 1e-10*norm(u)


def test_poisson_kernel():
    assert poisson_kernel_realspace(1.0, 0.0) == pytest.approx(np.pi**-2)
    assert poisson_kernel_realspace(1.0, 1.0) == pytest.approx(np.pi**-2/4)
    with pytest.raises(ConfigError):
        poisson_kernel_realspace(0.0, 1.0)


@pytest.mark.parametrize("t", [0.1, 1.0])
@pytest.mark.parametrize("s", [0.1, 1.0])
def test_poisson_semigroup(t, s):
    grid = RadialGrid(1000, 30.0)
    u = RadialField(grid, np.exp(-grid.r**2)*(1 + grid.r))
    composed = poisson_semigroup(poisson_semigroup(u, t), s)
    assert norm(composed - poisson_semigroup(u, t+s)) < 1e-10*norm(u)


def test_poisson_matches_convolution():
    grid = RadialGrid(4096, 40.0)
    bump = lambda s: np.where(s < 1, (1 - s**2)**3, 0.0)
    smoothed = poisson_semigroup(RadialField(grid, bump(grid.r)), 1.0)

    def convolution(r):
        kernel = lambda s: (2*np.pi/r)*s*bump(s)/(2*np.pi**2)*(1/(1 + (r-s)**2) - 1/(1 + (r+s)**2))
        return quad(kernel, 0, 1, epsabs=1e-13)[0]
    for target in (0.5, 1.0, 2.0, 3.0):
        j = np.argmin(np.abs(grid.r - target))
        assert abs(smoothed.values[j] - convolution(grid.r[j])) < 1e-4


def test_newton_unit_ball():
    grid = RadialGrid(2999, 3.0)
    rho = unit_ball(grid)
    r = grid.r
    phi = newton_potential(rho).values
    exact = np.where(r < 1, 2*np.pi*(3 - r**2)/3, 4*np.pi/(3*r))
    edge = np.isclose(r, 1.0)
    assert np.max(np.abs(phi - exact)[~edge]) < 1e-6
    assert np.max(np.abs(phi - exact)[edge]) < 1e-3
    assert origin_value(phi) == pytest.approx(2*np.pi, abs=1e-5)
    exterior = r >= 1.5
    assert np.max(np.abs(phi - quadrature_3d(rho)/r)[exterior]) < 1e-8


def test_newton_outside_support():
    grid = RadialGrid(2000, 10.0)
    rho = RadialField(grid, np.where(grid.r < 1, (1 - grid.r**2)**3, 0.0))
    phi = newton_potential(rho).values
    outside = grid.r >= 1.1
    assert np.max(np.abs(phi - quadrature_3d(rho)/grid.r)[outside]) < 1e-12*np.max(phi)
    assert np.all(newton_potential(0*rho).values == 0)


def test_newton_gaussian():
    grid = RadialGrid(2399, 40.0)
    r = grid.r
    phi = newton_potential(RadialField(grid, np.exp(-r**2))).values
    assert np.max(np.abs(phi - np.pi**1.5*erf(r)/r)) < 1e-6
    u = RadialField(grid, np.exp(-r**2/2))
    expected = np.pi**1.5*erf(r)/r*np.exp(-r**2/2)
    assert np.max(np.abs(hartree_term(u).values - expected)) < 1e-6


@pytest.mark.parametrize("width", [0.5, 1.0, 3.0])
def test_newton_monotone(width):
    grid = RadialGrid(1024, 30.0)
    phi = newton_potential(RadialField(grid, np.exp(-grid.r**2/width**2))).values
    assert np.all(np.diff(phi) <= 0)


def test_outer_sweep_nonnegative():
    grid = RadialGrid(100, 5.0)
    with seeded(4) as random:
        rho = random.rand(grid.n)
    assert np.all(outer_sweep(grid, rho) >= 0)


def test_dipole_sweep():
    grid = RadialGrid(2047, 8.0)
    r = grid.r
    potential = multipole_sweep(grid, r*np.exp(-r**2), ell=1)
    exact = -np.pi**1.5/2*(2*np.exp(-r**2)/(np.sqrt(np.pi)*r) - erf(r)/r**2)
    assert np.max(np.abs(potential - exact)) < 1e-6*np.max(np.abs(exact))


def test_dipole_sweep_monte_carlo():
    grid = RadialGrid(1023, 8.0)
    r = grid.r
    potential = multipole_sweep(grid, r*np.exp(-r**2), ell=1)
    j = np.argmin(np.abs(r - 1.0))
    x = np.array([0.0, 0.0, r[j]])
    with seeded(0) as random:
        y = random.randn(1000000, 3)/np.sqrt(2)
    # density y_z exp(-|y|^2) = pi^(3/2) E[y_z/|x - y|] for y ~ N(0, I/2)
    estimate = np.pi**1.5*np.mean(y[:, 2]/np.linalg.norm(x - y, axis=1))
    assert estimate == pytest.approx(potential[j], rel=2e-2)


def test_hartree_homogeneity():
    grid = RadialGrid(400, 20.0)
    u = RadialField(grid, np.exp(-grid.r**2/2))
    assert np.all(hartree_term(0*u).values == 0)
    assert norm(hartree_term(2.5*u) - 2.5**3*hartree_term(u)) < 1e-12*norm(hartree_term(2.5*u))


@pytest.mark.parametrize("n, r_max, a", [(2048, 40.0, 0.5), (2048, 20.0, 50.0)])
def test_hardy_kato(n, r_max, a):
    grid = RadialGrid(n, r_max)
    ratio = hardy_kato_check(RadialField(grid, np.exp(-a*grid.r**2)))
    assert ratio <= 1
    assert ratio == pytest.approx(1/KATO_CONSTANT, rel=1e-2)
    with pytest.raises(DegenerateFieldError):
        hardy_kato_check(RadialField(grid, np.zeros(grid.n)))


def test_convolution_of_gaussians():
    grid = RadialGrid(512, 40.0)
    g = SpectralField(grid, np.exp(-grid.xi**2/2))
    conv = radial_convolution(g, g)
    expected = np.pi**1.5*np.exp(-grid.xi**2/4)
    assert np.max(np.abs(conv.values - expected)) < 1e-2*np.pi**1.5


def test_convolution_triangle_inequality():
    grid = RadialGrid(300, 20.0)
    with seeded(6) as random:
        g = SpectralField(grid, random.randn(grid.n) + 1j*random.randn(grid.n))
        h = SpectralField(grid, random.randn(grid.n) + 1j*random.randn(grid.n))
    lhs = np.abs(radial_convolution(g, h).values)
    rhs = radial_convolution(abs(g), abs(h)).values
    assert np.all(lhs <= rhs*(1 + 1e-12) + 1e-300)
    with pytest.raises(GridMismatchError):
        radial_convolution(g, forward_transform(RadialField(RadialGrid(300, 21.0), np.ones(300))))
