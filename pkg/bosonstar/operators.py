"""Fourier multipliers, the Poisson semigroup and the Newton potential of
radial densities."""
import logging

import numpy as np

from bosonstar.spectral_core import (ConfigError, DegenerateFieldError,
    GridMismatchError, NonFiniteError, RadialField, SpectralField, _check_kind, forward_transform,
    inverse_transform, origin_value, spectral_quadrature_3d)


logger = logging.getLogger(__name__)

KATO_CONSTANT = np.pi/2
_CONVOLUTION_CHUNK = 256


class DispersionParams:
    """Parameters of the multipliers: mass m >= 0 of sqrt(-Laplacian + m^2),
    shift tau > 0 of its resolvent, time t > 0 of the Poisson semigroup.
    Every symbol constructor validates its arguments through this class."""
    def __init__(self, m=0.0, tau=1.0, t=1.0):
        if not m >= 0:
            raise ConfigError("m", "must be nonnegative, got {!r}".format(m))
        if not tau > 0:
            raise ConfigError("tau", "must be positive, got {!r}".format(tau))
        if not t > 0:
            raise ConfigError("t", "must be positive, got {!r}".format(t))
        self.m = float(m)
        self.tau = float(tau)
        self.t = float(t)

    def __repr__(self):
        return "DispersionParams(m={!r}, tau={!r}, t={!r})".format(self.m, self.tau, self.t)

    def dispersion(self, xi):
        return np.sqrt(xi**2 + self.m**2)


def sqrt_laplacian_symbol(m=0.0):
    p = DispersionParams(m=m)
    return p.dispersion


def resolvent_symbol(tau=1.0, m=0.0):
    p = DispersionParams(m=m, tau=tau)
    return lambda xi: 1/(p.dispersion(xi) + p.tau)


def poisson_symbol(t):
    p = DispersionParams(t=t)
    return lambda xi: np.exp(-p.t*xi)


def schrodinger_symbol(dt, m=0.0):
    p = DispersionParams(m=m)
    return lambda xi: np.exp(-1j*dt*p.dispersion(xi))


def apply_multiplier(u, symbol):
    _check_kind(u, RadialField)
    values = np.asarray(symbol(u.grid.xi))
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("symbol is not finite on every frequency node")
    return inverse_transform(forward_transform(u)*values)


def sqrt_laplacian(u, m=0.0):
    return apply_multiplier(u, sqrt_laplacian_symbol(m))


def resolvent(u, tau=1.0, m=0.0):
    """(sqrt(-Laplacian + m^2) + tau)^-1 u"""
    return apply_multiplier(u, resolvent_symbol(tau, m))


def poisson_semigroup(u, t):
    return apply_multiplier(u, poisson_symbol(t))


def poisson_kernel_realspace(t, r):
    """Kernel of exp(-t sqrt(-Laplacian)) in R^3, pi^-2 t/(t^2+r^2)^2"""
    if not t > 0:
        raise ConfigError("t", "must be positive, got {!r}".format(t))
    r = np.asarray(r, dtype=float)
    return t/(np.pi**2*(t**2 + r**2)**2)


def _kink_correction(grid, rho, fourth_order=True):
    """Euler-Maclaurin terms of the trapezoid sweeps at s = r, where the
    kernel 1/max(r, s) has a kink. The second order term does not depend on
    the multipole order."""
    h2 = grid.dr**2
    correction = 4*np.pi*h2/12*rho
    if fourth_order:
        padded = np.concatenate(([origin_value(rho)], rho, [0.0]))
        second = (padded[2:] - 2*padded[1:-1] + padded[:-2])/h2
        first = (padded[2:] - padded[:-2])/(2*grid.dr)
        laplacian = second + 2*first/grid.r
        correction = correction - 4*np.pi*h2**2/240*laplacian
    return correction


def multipole_sweep(grid, rho, ell=0, fourth_order=True):
    """(4 pi/(2 ell+1)) int r_<^ell/r_>^(ell+1) rho(s) s^2 ds on the nodes, by
    one prefix and one suffix sum."""
    r = grid.r
    inner = np.cumsum(rho*r**(ell+2)) - rho*r**(ell+2)/2
    outer = np.cumsum((rho*r**(1-ell))[::-1])[::-1] - rho*r**(1-ell)/2
    potential = 4*np.pi*grid.dr/(2*ell+1)*(inner/r**(ell+1) + outer*r**ell)
    return potential - _kink_correction(grid, rho, fourth_order and ell == 0)


def newton_potential(rho):
    """(rho * |x|^-1)(r) = (4 pi/r) int_0^r rho s^2 ds + 4 pi int_r^inf rho s ds"""
    _check_kind(rho, RadialField)
    values = rho.values
    if np.iscomplexobj(values):
        return RadialField(rho.grid, multipole_sweep(rho.grid, values.real)
                           + 1j*multipole_sweep(rho.grid, values.imag))
    return RadialField(rho.grid, multipole_sweep(rho.grid, values))


def outer_sweep(grid, rho):
    """4 pi int_r^inf rho(s) s ds, with the diagonal weight matching the
    kink correction of newton_potential"""
    r = grid.r
    outer = np.cumsum((rho*r)[::-1])[::-1] - rho*r/2
    return 4*np.pi*grid.dr*outer - _kink_correction(grid, rho, False)/2


def hartree_term(u):
    """F(u) = (|u|^2 * |x|^-1) u"""
    return newton_potential(u.abs2().real)*u


def kinetic_energy(u, m=0.0):
    """<u, sqrt(-Laplacian + m^2) u>"""
    uhat = forward_transform(u)
    return spectral_quadrature_3d(uhat.abs2().real*sqrt_laplacian_symbol(m)(u.grid.xi))


def hardy_kato_check(u):
    """max_r (u^2 * |x|^-1)(r) / ((pi/2) <u, sqrt(-Laplacian) u>), at most 1"""
    kinetic = kinetic_energy(u)
    if kinetic == 0:
        raise DegenerateFieldError("Hardy-Kato ratio is undefined for the zero field")
    ratio = np.max(newton_potential(u.abs2().real).values)/(KATO_CONSTANT*kinetic)
    if 1 < ratio <= 1+1e-3:
        logger.warning("Hardy-Kato ratio %.8f exceeds 1 by a grid artifact", ratio)
    elif ratio > 1+1e-3:
        logger.error("Hardy-Kato ratio %.8f violates the inequality", ratio)
    return float(ratio)


def _cumulative_radial_moment(grid, h):
    """H(zeta) = int_0^zeta h(s) s ds at 0, xi_1..xi_n, xi_(n+1), trapezoid"""
    integrand = np.concatenate(([0.0], h*grid.xi, [0.0]))
    H = np.concatenate(([0.0], np.cumsum((integrand[1:] + integrand[:-1])/2)*grid.dxi))
    nodes = np.arange(grid.n+2)*grid.dxi
    return nodes, H


def radial_convolution(g, h):
    """3D convolution of two radial frequency profiles.

    (g*h)(xi) = (2 pi/xi) int g(eta) eta [H(xi+eta) - H(|xi-eta|)] d eta with
    H(zeta) = int_0^zeta h(s) s ds. Every quadrature weight is nonnegative,
    so |g*h| <= |g|*|h| holds on the grid.
    """
    _check_kind(g, SpectralField)
    _check_kind(h, SpectralField)
    if g.grid != h.grid:
        raise GridMismatchError("{!r} != {!r}".format(g.grid, h.grid))
    grid = g.grid
    xi = grid.xi
    nodes, H = _cumulative_radial_moment(grid, h.values)
    weights = grid.dxi*g.values*xi
    out = np.empty(grid.n, dtype=np.result_type(g.values, h.values))
    for start in range(0, grid.n, _CONVOLUTION_CHUNK):
        rows = xi[start:start+_CONVOLUTION_CHUNK, None]
        upper = np.interp(rows + xi[None, :], nodes, H)
        lower = np.interp(np.abs(rows - xi[None, :]), nodes, H)
        out[start:start+_CONVOLUTION_CHUNK] = (upper - lower) @ weights
    return SpectralField(grid, 2*np.pi/xi*out)
