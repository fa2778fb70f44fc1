"""Ground state of sqrt(-Laplacian + m^2) Q + mu Q = (Q^2 * |x|^-1) Q.

The fixed point form Q = (sqrt(-Laplacian + m^2) + mu)^-1 F(Q) is iterated
with a Petviashvili stabilization factor: the plain map is unstable along
the direction of Q because F is homogeneous of degree 3.
"""
import logging

import numpy as np
from tqdm import tqdm

from bosonstar.data_collection import Trace
from bosonstar.energetics import energy_breakdown, equation_residual
from bosonstar.miscellaneous import Record
from bosonstar.operators import hartree_term, sqrt_laplacian_symbol
from bosonstar.spectral_core import (BosonStarError, ConfigError, RadialField,
    RadialGrid, SpectralField, _check_kind, forward_transform, inverse_transform, norm,
    origin_value, quadrature_3d, to_grid)


logger = logging.getLogger(__name__)

INITS = ("gaussian", "lorentzian")


class DivergenceError(BosonStarError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ProjectionError(BosonStarError):
    pass


class ConsistencyAlarm(BosonStarError):
    pass


class SolverConfig:
    def __init__(self, grid=None, init="gaussian", init_width=1.0, gamma=1.5,
                 tol_residual=1e-8, max_iter=5000, m=0.0, mu=1.0,
                 clamp_tol=1e-12, progress=False):
        self.grid = grid if grid is not None else RadialGrid()
        if isinstance(init, str) and init not in INITS:
            raise ConfigError("init", "must be one of {} or a RadialField, got {!r}"
                              .format(INITS, init))
        if not isinstance(init, (str, RadialField)):
            raise ConfigError("init", "must be one of {} or a RadialField".format(INITS))
        if not init_width > 0:
            raise ConfigError("init_width", "must be positive, got {!r}".format(init_width))
        if not gamma > 1:
            raise ConfigError("gamma", "must be > 1, got {!r}".format(gamma))
        if not tol_residual > 0:
            raise ConfigError("tol", "must be positive, got {!r}".format(tol_residual))
        if int(max_iter) != max_iter or max_iter < 1:
            raise ConfigError("max_iter", "must be a positive integer, got {!r}".format(max_iter))
        if not m >= 0:
            raise ConfigError("m", "must be nonnegative, got {!r}".format(m))
        if not mu > -m:
            raise ConfigError("mu", "must satisfy mu > -m, got mu={!r}, m={!r}".format(mu, m))
        if not clamp_tol >= 0:
            raise ConfigError("clamp_tol", "must be nonnegative, got {!r}".format(clamp_tol))
        self.init = init
        self.init_width = float(init_width)
        self.gamma = float(gamma)
        self.tol_residual = float(tol_residual)
        self.max_iter = int(max_iter)
        self.m = float(m)
        self.mu = float(mu)
        self.clamp_tol = float(clamp_tol)
        self.progress = progress

    _fields = ("init", "init_width", "gamma", "tol_residual", "max_iter", "m",
               "mu", "clamp_tol", "progress")

    def replace(self, **changes):
        kwargs = {name: getattr(self, name) for name in self._fields}
        kwargs["grid"] = self.grid
        kwargs.update(changes)
        return SolverConfig(**kwargs)

    def to_dict(self):
        init = self.init if isinstance(self.init, str) else "field"
        return {"n": self.grid.n, "r_max": self.grid.r_max, "init": init,
                "init_width": self.init_width, "gamma": self.gamma,
                "tol": self.tol_residual, "max_iter": self.max_iter,
                "m": self.m, "mu": self.mu}

    def initial_field(self):
        grid = self.grid
        if isinstance(self.init, RadialField):
            u = to_grid(self.init.real, grid)
        elif self.init == "gaussian":
            u = RadialField(grid, np.exp(-grid.r**2/(2*self.init_width**2)))
        else:
            u = RadialField(grid, 1/(1 + (grid.r/self.init_width)**2))
        if np.any(u.values < 0) or not np.any(u.values > 0):
            raise ConfigError("init", "initial field must be nonnegative and nonzero")
        return u


class GroundStateReport(Record):
    def summary(self):
        out = super().summary()
        out["trace"] = {"residual": self.trace[:, "residual"],
                        "stabilization": self.trace[:, "stabilization"]}
        return out


def _weighted_norm(values, weights):
    return np.sqrt(np.sum(weights*np.abs(values)**2))


def solve_ground_state(cfg, trace=None):
    """Petviashvili iteration u <- s^gamma (L)^-1 F(u), L = sqrt(xi^2+m^2) + mu,
    s = <L u, u>/<F(u), u>, until the equation residual is below
    cfg.tol_residual."""
    grid = cfg.grid
    symbol = sqrt_laplacian_symbol(cfg.m)(grid.xi) + cfg.mu
    trace = trace if trace is not None else Trace()
    u = cfg.initial_field()

    worst_clamp = 0.0
    converged = False
    s = np.nan
    iterations = tqdm(range(cfg.max_iter+1), disable=not cfg.progress,
                      desc="ground state", leave=False)
    for iteration in iterations:
        F = hartree_term(u)
        uhat = forward_transform(u).values
        Fhat = forward_transform(F).values
        Luhat = symbol*uhat
        size = _weighted_norm(uhat, grid.spectral_weights)
        residual = _weighted_norm(Luhat - Fhat, grid.spectral_weights)/size
        coupling = quadrature_3d(F*u)
        if not np.isfinite(residual) or coupling <= 0:
            raise DivergenceError("iteration {} left the admissible cone "
                                  "(residual {}, <F(u),u> {})".format(iteration, residual, coupling),
                                  trace)
        s = np.sum(grid.spectral_weights*Luhat*uhat)/coupling
        trace["residual"] = float(residual)
        trace["stabilization"] = float(s)
        trace.checkpoint()
        if cfg.progress:
            iterations.set_postfix(residual="{:.2e}".format(residual))
        if residual <= cfg.tol_residual:
            converged = True
            break
        if iteration == cfg.max_iter:
            break

        values = s**cfg.gamma*inverse_transform(SpectralField(grid, Fhat/symbol)).values
        negative = np.minimum(values, 0.0)
        if np.any(negative):
            clamped = _weighted_norm(negative, grid.weights)/_weighted_norm(values, grid.weights)
            worst_clamp = max(worst_clamp, clamped)
            logger.debug("iteration %d: clamped negative part of relative size %.3e",
                         iteration, clamped)
            if clamped > cfg.clamp_tol:
                raise ProjectionError("iteration {}: negative part of relative size {:.3e} "
                                      "exceeds clamp_tol {:.1e}"
                                      .format(iteration, clamped, cfg.clamp_tol))
            values = np.maximum(values, 0.0)
        u = RadialField(grid, values)

    if not converged:
        raise DivergenceError("no convergence after {} iterations (residual {:.3e} > {:.1e})"
                              .format(cfg.max_iter, residual, cfg.tol_residual), trace)
    if worst_clamp > 0:
        logger.warning("projection clamped negative parts up to relative size %.3e",
                       worst_clamp)
    logger.info("ground state on %r: residual %.3e after %d iterations, N* = %.12f",
                grid, residual, iteration, quadrature_3d(u.abs2()))

    return GroundStateReport(
        Q=u,
        N_star=float(quadrature_3d(u.abs2())),
        energy=energy_breakdown(u),
        residual=float(residual),
        iterations=iteration,
        stabilization=float(s),
        Q0=float(origin_value(u)),
        clamped=float(worst_clamp),
        config=cfg.to_dict(),
        trace=trace,
    )


def refine_check(cfg, factor=2):
    """N* on (n, r_max) and (factor*n, r_max) and their relative drift"""
    coarse = solve_ground_state(cfg)
    if factor == 1:
        fine = coarse
    else:
        fine = solve_ground_state(cfg.replace(grid=cfg.grid.refined(factor)))
    drift = abs(coarse.N_star - fine.N_star)/fine.N_star
    return Record(N_star_coarse=coarse.N_star, N_star_fine=fine.N_star,
                  drift=float(drift), n_coarse=cfg.grid.n, n_fine=cfg.grid.n*factor)


def scan_profile(Q):
    """Positivity and strict monotonicity at every node"""
    _check_kind(Q, RadialField)
    values = Q.values.real
    nonpositive = np.flatnonzero(values <= 0)
    nonmonotone = np.flatnonzero(np.diff(values) >= 0)
    return Record(positive=not len(nonpositive),
                  strictly_decreasing=not len(nonmonotone),
                  first_nonpositive=int(nonpositive[0]) if len(nonpositive) else None,
                  first_nonmonotone=int(nonmonotone[0]) if len(nonmonotone) else None)


def nonexistence_probe(E, cfg, blowup_norm=1e50, collapse_ratio=1e-10):
    """Look for a radial solution of sqrt(-Laplacian) u - F(u) = E u.

    For E >= 0 there is none: the unstabilized map
    u <- (sqrt(-Laplacian) + 1)^-1 (F(u) + (E+1) u) either collapses to 0 or
    blows up. A converged nonzero solution raises ConsistencyAlarm. A
    negative E is the ground state problem with mu = -E.
    """
    if E < 0:
        report = solve_ground_state(cfg.replace(mu=-E, m=0.0))
        return Record(E=float(E), collapsed=False, outcome="converged",
                      final_norm=float(norm(report.Q)), iterations=report.iterations,
                      residual=report.residual)

    grid = cfg.grid
    symbol = 1/(grid.xi + 1)
    u = cfg.initial_field()
    initial_norm = norm(u)
    outcome = "stalled"
    residual = np.inf
    final_norm = initial_norm
    with np.errstate(over="ignore", invalid="ignore"):
        iterations = tqdm(range(cfg.max_iter), disable=not cfg.progress,
                          desc="nonexistence E={}".format(E), leave=False)
        for iteration in iterations:
            values = inverse_transform(forward_transform(hartree_term(u) + (E+1)*u)*symbol).values
            size = np.sqrt(np.sum(grid.weights*values**2))
            if not np.isfinite(size) or size > blowup_norm:
                outcome = "blew_up"
                final_norm = float(size) if np.isfinite(size) else np.inf
                break
            u = RadialField(grid, values)
            final_norm = float(size)
            if size < collapse_ratio*initial_norm:
                outcome = "collapsed"
                break
            residual = equation_residual(u, mu=-E)
            if residual <= cfg.tol_residual:
                raise ConsistencyAlarm("nonzero radial solution with E = {} >= 0 "
                                       "(residual {:.3e}, norm {:.3e})".format(E, residual, size))
    logger.info("nonexistence probe E=%g: %s after %d iterations", E, outcome, iteration+1)
    return Record(E=float(E), collapsed=outcome == "collapsed", outcome=outcome,
                  final_norm=float(final_norm), iterations=iteration+1,
                  residual=float(residual) if np.isfinite(residual) else None)
