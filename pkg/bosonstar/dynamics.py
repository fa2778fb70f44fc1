"""Radial split-step evolution of i d_t psi = sqrt(-Laplacian + m^2) psi - (|x|^-1 * |psi|^2) psi."""
import logging

import numpy as np
from tqdm import tqdm

from bosonstar.miscellaneous import Record
from bosonstar.operators import newton_potential, schrodinger_symbol, sqrt_laplacian_symbol
from bosonstar.spectral_core import (ConfigError, NonFiniteError, RadialField, _check_kind,
    forward_transform, inverse_transform, norm, quadrature_3d,
    spectral_quadrature_3d)


logger = logging.getLogger(__name__)

STABLE_DT = 0.01


class WaveField(RadialField):
    def __init__(self, grid, values, t=0.0, m=0.0, aborted_at=None):
        super().__init__(grid, np.asarray(values, dtype=complex))
        self.t = float(t)
        self.m = float(m)
        self.aborted_at = aborted_at

    def with_values(self, values):
        return WaveField(self.grid, values, self.t, self.m, self.aborted_at)

    @classmethod
    def from_field(cls, u, t=0.0, m=0.0):
        _check_kind(u, RadialField)
        return cls(u.grid, u.values, t=t, m=m)


def _phase(values, grid, tau):
    potential = newton_potential(RadialField(grid, np.abs(values)**2))
    return values*np.exp(1j*tau*potential.values)


def evolve(psi0, dt, steps, interaction=True, trace=None, record_every=1,
           snapshot=None, snapshot_every=0, progress=False):
    """Strang splitting: a half step of the Hartree phase exp(+i dt/2 Phi),
    a full kinetic step exp(-i dt sqrt(xi^2+m^2)) in Fourier space, and
    another half phase step. Phi = |x|^-1 * |psi|^2 is recomputed from the
    current state before each half step.

    A non-finite state stops the run; the last finite state is returned with
    `aborted_at` set to the failing step.
    """
    if not isinstance(psi0, WaveField):
        psi0 = WaveField.from_field(psi0)
    if not dt > 0:
        raise ConfigError("dt", "must be positive, got {!r}".format(dt))
    if int(steps) != steps or steps < 0:
        raise ConfigError("steps", "must be a nonnegative integer, got {!r}".format(steps))
    if dt > STABLE_DT:
        logger.warning("dt = %g is above the stable step %g", dt, STABLE_DT)
    grid = psi0.grid
    kinetic = schrodinger_symbol(dt, psi0.m)(grid.xi)
    values = psi0.values
    t = psi0.t

    def record(values, t):
        if trace is not None:
            for key, value in mass_and_energy(WaveField(grid, values, t, psi0.m)).items():
                trace[key] = value
            trace["t"] = t
            trace.checkpoint()

    if trace is not None and record_every:
        record(values, t)
    with np.errstate(over="ignore", invalid="ignore"):
        for step in tqdm(range(1, int(steps)+1), disable=not progress, desc="evolve", leave=False):
            try:
                new = values
                if interaction:
                    new = _phase(new, grid, dt/2)
                psihat = forward_transform(RadialField(grid, new))
                new = inverse_transform(psihat*kinetic).values
                if interaction:
                    new = _phase(new, grid, dt/2)
                if not np.all(np.isfinite(new)):
                    raise NonFiniteError("state")
            except NonFiniteError:
                logger.warning("non-finite state at step %d (t = %g), run aborted", step, t+dt)
                return WaveField(grid, values, t, psi0.m, aborted_at=step)
            values = new
            t = psi0.t + step*dt
            if trace is not None and record_every and step % record_every == 0:
                record(values, t)
            if snapshot is not None and snapshot_every and step % snapshot_every == 0:
                snapshot(WaveField(grid, values, t, psi0.m), step)
    return WaveField(grid, values, t, psi0.m)


def mass_and_energy(psi):
    """mass |psi|^2, kinetic <psi, sqrt(-Laplacian + m^2) psi>, potential
    -(1/2) int (|x|^-1 * |psi|^2) |psi|^2 and their total"""
    _check_kind(psi, RadialField)
    m = getattr(psi, "m", 0.0)
    density = RadialField(psi.grid, np.abs(psi.values)**2)
    psihat = forward_transform(psi)
    mass = float(quadrature_3d(density))
    kinetic = float(spectral_quadrature_3d(
        psihat.abs2().real*sqrt_laplacian_symbol(m)(psi.grid.xi)))
    potential = float(-quadrature_3d(density*newton_potential(density))/2)
    return Record(mass=mass, kinetic=kinetic, potential=potential, total=kinetic+potential)


def relative_distance(psi, phi):
    return float(norm(psi - phi)/norm(phi))


def splitting_order(psi0, dt, t_final, interaction=True):
    """Errors at t_final of steps dt and dt/2 against a dt/8 reference and
    the measured order log2(e_dt/e_(dt/2))"""
    steps = int(round(t_final/dt))
    if steps < 1 or abs(steps*dt - t_final) > 1e-9*t_final:
        raise ConfigError("dt", "t_final = {} is not a multiple of dt = {}".format(t_final, dt))
    reference = evolve(psi0, dt/8, 8*steps, interaction)
    coarse = evolve(psi0, dt, steps, interaction)
    fine = evolve(psi0, dt/2, 2*steps, interaction)
    errors = (relative_distance(coarse, reference), relative_distance(fine, reference))
    return Record(dt=dt, t_final=t_final, errors=errors,
                  order=float(np.log2(errors[0]/errors[1])))


def stationarity_report(Q, dt=0.005, steps=200, mu=1.0, m=0.0, trace=None,
                        snapshot=None, snapshot_every=0, progress=False):
    """Evolve a ground state of sqrt(-Laplacian + m^2) Q + mu Q = F(Q): |psi(t)|
    stays Q and the phase advances by mu t"""
    psi0 = WaveField.from_field(Q, m=m)
    start = mass_and_energy(psi0)
    psi = evolve(psi0, dt, steps, trace=trace, snapshot=snapshot,
                 snapshot_every=snapshot_every, progress=progress)
    end = mass_and_energy(psi)
    overlap = quadrature_3d(Q.conj()*psi)
    phase = float(np.angle(overlap))
    return Record(t=psi.t, amplitude_error=relative_distance(abs(psi), Q),
                  phase=phase, phase_error=abs(phase - mu*psi.t),
                  mass_drift=abs(end.mass - start.mass)/start.mass,
                  energy_drift=abs(end.total - start.total)/abs(start.total),
                  aborted_at=psi.aborted_at)
