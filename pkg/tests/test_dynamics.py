import logging

import numpy as np
import pytest

from bosonstar.data_collection import Trace
from bosonstar.dynamics import (WaveField, evolve, mass_and_energy, relative_distance,
    splitting_order, stationarity_report)
from bosonstar.spectral_core import ConfigError, RadialField, RadialGrid


def gaussian_wave(grid, amplitude=0.5):
    return WaveField(grid, amplitude*np.exp(-grid.r**2/2))


def test_stationarity(ground_state):
    report = stationarity_report(ground_state.Q)
    assert report.t == pytest.approx(1.0)
    assert report.aborted_at is None
    assert report.amplitude_error < 1e-3
    assert report.phase_error < 1e-3
    assert report.mass_drift < 1e-8
    assert report.energy_drift < 1e-5


def test_conserved_quantities(ground_state):
    Q = ground_state.Q
    quantities = mass_and_energy(WaveField.from_field(Q))
    assert quantities.mass == pytest.approx(ground_state.N_star, rel=1e-12)
    assert quantities.kinetic == pytest.approx(ground_state.energy.T, rel=1e-12)
    assert quantities.potential == pytest.approx(-ground_state.energy.D/2, rel=1e-12)


def test_sub_threshold_evolution(ground_state):
    psi0 = WaveField.from_field(0.9*ground_state.Q)
    psi = evolve(psi0, 0.01, 200)
    assert psi.aborted_at is None
    assert psi.t == pytest.approx(2.0)
    assert mass_and_energy(psi).mass == pytest.approx(mass_and_energy(psi0).mass, rel=1e-10)


def test_free_evolution():
    grid = RadialGrid(512, 40.0)
    psi0 = gaussian_wave(grid)
    psi = evolve(psi0, 0.01, 50, interaction=False)
    assert mass_and_energy(psi).kinetic == pytest.approx(mass_and_energy(psi0).kinetic, rel=1e-12)
    assert relative_distance(psi, psi0) > 1e-3


def test_zero_data():
    grid = RadialGrid(128, 10.0)
    psi = evolve(WaveField(grid, np.zeros(grid.n)), 0.01, 10)
    assert np.all(psi.values == 0)
    assert mass_and_energy(psi).total == 0


def test_gauge_covariance():
    grid = RadialGrid(256, 20.0)
    psi0 = gaussian_wave(grid, 1.0)
    phase = np.exp(0.7j)
    rotated = evolve(psi0*phase, 0.01, 20)
    assert relative_distance(rotated, evolve(psi0, 0.01, 20)*phase) < 1e-12


def test_splitting_order(caplog):
    grid = RadialGrid(512, 40.0)
    with caplog.at_level(logging.WARNING, logger="bosonstar.dynamics"):
        report = splitting_order(gaussian_wave(grid), 0.05, 0.5)
    assert 1.7 <= report.order <= 2.3
    assert report.errors[1] < report.errors[0]
    assert "above the stable step" in caplog.text
    with pytest.raises(ConfigError):
        splitting_order(gaussian_wave(grid), 0.3, 0.5)


def test_trace_and_snapshots():
    grid = RadialGrid(128, 10.0)
    trace = Trace()
    snapshots = []
    psi = evolve(gaussian_wave(grid), 0.01, 50, trace=trace, record_every=10,
                 snapshot=lambda field, step: snapshots.append((step, field.t)), snapshot_every=20)
    assert trace[:, "t"] == pytest.approx([0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    assert trace[-1:, "mass"] == pytest.approx([mass_and_energy(psi).mass])
    assert [step for step, _ in snapshots] == [20, 40]
    assert snapshots[0][1] == pytest.approx(0.2)


def test_abort_on_overflow():
    grid = RadialGrid(64, 8.0)
    psi0 = WaveField(grid, 1e200*np.exp(-grid.r**2))
    psi = evolve(psi0, 0.01, 5)
    assert psi.aborted_at == 1
    assert psi.t == 0
    assert np.array_equal(psi.values, psi0.values)


def test_evolve_validation():
    grid = RadialGrid(64, 8.0)
    psi0 = WaveField.from_field(RadialField(grid, np.exp(-grid.r**2)))
    assert psi0.is_complex
    for key, kwargs in (("dt", dict(dt=0.0, steps=1)), ("steps", dict(dt=0.01, steps=-1))):
        with pytest.raises(ConfigError) as excinfo:
            evolve(psi0, **kwargs)
        assert excinfo.value.key == key
    assert evolve(psi0, 0.01, 0).t == 0
