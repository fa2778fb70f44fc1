import logging

import numpy as np

from bosonstar.miscellaneous import Record
from bosonstar.operators import (hartree_term, kinetic_energy, newton_potential,
    outer_sweep, sqrt_laplacian)
from bosonstar.spectral_core import (BosonStarError, ConfigError,
    DegenerateFieldError, RadialField, _check_kind, norm, quadrature_3d,
    radial_derivative, resample)


logger = logging.getLogger(__name__)

POLISH_MAX_RESIDUAL = 1e-6
POLISH_FLOOR = 1e-12


class ResolutionError(BosonStarError):
    pass


class EnergyBreakdown(Record):
    """T = |(-Laplacian)^(1/4) u|^2, M = |u|^2, D the Coulomb self interaction
    of |u|^2, and I = T*M/D"""


class RescaleParams:
    def __init__(self, kappa=1.0, lam=1.0, E=0.0):
        if not kappa > 0:
            raise ConfigError("kappa", "must be positive, got {!r}".format(kappa))
        if not lam > 0:
            raise ConfigError("lambda", "must be positive, got {!r}".format(lam))
        self.kappa = float(kappa)
        self.lam = float(lam)
        self.E = float(E)

    def __repr__(self):
        return "RescaleParams(kappa={!r}, lam={!r}, E={!r})".format(self.kappa, self.lam, self.E)


def energy_parts(u):
    _check_kind(u, RadialField)
    density = u.abs2().real
    T = kinetic_energy(u)
    M = quadrature_3d(density)
    D = quadrature_3d(density*newton_potential(density))
    return float(T), float(M), float(D)


def energy_breakdown(u):
    T, M, D = energy_parts(u)
    if D <= 0:
        raise DegenerateFieldError("I = T*M/D is undefined for the zero field")
    return EnergyBreakdown(T=T, M=M, D=D, I=T*M/D)


def minimization_functional(u):
    return energy_breakdown(u).I


def kato_lower_bound():
    """inf I >= 2/pi, from D <= sup(|u|^2 * |x|^-1) M <= (pi/2) T M"""
    return 2/np.pi


def equation_residual(u, m=0.0, mu=1.0, kappa=1.0):
    """|sqrt(-Laplacian + m^2) u + mu u - kappa F(u)| / |u|"""
    size = norm(u)
    if size == 0:
        raise DegenerateFieldError("the residual is relative to |u|, which is 0")
    defect = sqrt_laplacian(u, m) + mu*u - kappa*hartree_term(u)
    return float(norm(defect)/size)


def rescale_to_canonical(u, p, polish=True):
    """v(x) = kappa^(1/2) lambda^(-3/2) u(x/lambda).

    If u solves sqrt(-Laplacian) u - kappa (u^2 * |x|^-1) u = -lambda u, v
    solves the equation with kappa = lambda = 1 and |v|^2 = kappa |u|^2.
    In the continuum the relative residual of v is rho/lambda, rho the one
    of u. On the grid, interpolation and the part of u beyond r_max (taken
    as 0) add to it, so a near solution (rho <= POLISH_MAX_RESIDUAL) whose
    rescaled residual exceeds 2 rho is polished by the ground state
    iteration down to max(rho, POLISH_FLOOR). Other fields are only
    resampled.
    """
    _check_kind(u, RadialField)
    grid = u.grid
    if p.kappa == 1 and p.lam == 1:
        return u
    points = grid.r/p.lam
    if np.count_nonzero(points < grid.r[0]) > grid.n/2:
        raise ResolutionError("lambda = {} maps most nodes below r_1 = {}"
                              .format(p.lam, grid.r[0]))
    if points[-1] > grid.r_max:
        logger.debug("rescaling reads u beyond r_max up to %g, taken as 0", points[-1])
    v = RadialField(grid, np.sqrt(p.kappa)*p.lam**-1.5*resample(u, points))
    if not polish or not np.any(u.values):
        return v
    rho = equation_residual(u, mu=p.lam, kappa=p.kappa)
    if rho > POLISH_MAX_RESIDUAL:
        return v
    rescaled = equation_residual(v)
    if rescaled <= 2*rho:
        return v
    from bosonstar.solver import SolverConfig, solve_ground_state
    tol = max(rho, POLISH_FLOOR)
    sign = 1.0 if v.values[0] >= 0 else -1.0
    report = solve_ground_state(SolverConfig(grid, init=sign*v, tol_residual=tol))
    logger.info("rescaled residual %.3e > 2*%.3e, polished to %.3e in %d iterations",
                rescaled, rho, report.residual, report.iterations)
    return sign*report.Q


def virial_report(u, E=0.0):
    """Virial quantities with V = -(u^2 * |x|^-1).

    Newton's theorem gives V + r dV/dr = -4 pi int_r^inf |u|^2 s ds, which is
    `newton_lhs`; `lhs` integrates (V + r dV/dr - E)|u|^2. The centered
    difference version of V + r dV/dr is returned too, with its relative l2
    distance to the closed form.
    """
    _check_kind(u, RadialField)
    grid = u.grid
    density = u.abs2().real
    V = -newton_potential(density)
    newton_lhs = RadialField(grid, -outer_sweep(grid, density.values))
    difference_lhs = V + radial_derivative(V, "centered")*grid.r
    lhs = quadrature_3d((newton_lhs - E)*density)
    size = norm(newton_lhs)
    discrepancy = float(norm(difference_lhs - newton_lhs)/size) if size > 0 else 0.0
    return Record(lhs=float(lhs), rhs=0.0, interaction=float(quadrature_3d(newton_lhs*density)),
                  newton_lhs=newton_lhs, difference_lhs=difference_lhs,
                  difference_discrepancy=discrepancy)
