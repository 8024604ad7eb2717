"""
Copyright (c) 2024 vpme-kinetic contributors

This file is part of vpme-kinetic.

vpme-kinetic is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

vpme-kinetic is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with vpme-kinetic.  If not, see <https://www.gnu.org/licenses/>.
"""
from unittest.mock import patch

import numpy as np
import pytest

from plasma.vpme.core.exceptions import CFLViolation, ConfigError, UnknownKind
from plasma.vpme.domain import TorusGrid, torus_displacement
from plasma.vpme.particles import (
    KINDS, InitialData, ParticleEnsemble, SimConfig, Simulation, check_decay, empirical_moment,
    resolve_sampler, run, sample_initial
)


def fixed_sampler(rng, n_particles, dim, data):
    positions = np.linspace(-0.5, 0.5, n_particles, endpoint=False).reshape(-1, 1)
    return np.repeat(positions, dim, axis=1), np.zeros((n_particles, dim))


@pytest.mark.parametrize("overrides", [
    {"temperature": 0.0},
    {"amplitude": 1.0},
    {"mode": 0},
    {"k0": -1.0},
])
def test_initial_data_rejects_invalid_parameters(overrides):
    with pytest.raises(ConfigError):
        InitialData(**overrides)


def test_hypotheses_are_reported():
    assert InitialData(k0=3.0, m0=4.0).check_hypotheses(2)
    assert not InitialData(k0=1.5, m0=4.0).check_hypotheses(2)


def test_unknown_kind_is_rejected():
    with pytest.raises(UnknownKind):
        resolve_sampler(InitialData(kind="plasma_wave"))


def test_custom_kind_needs_a_sampler():
    with pytest.raises(UnknownKind):
        resolve_sampler(InitialData(kind="custom"))


def test_custom_kind_resolves_a_module_path():
    data = InitialData(kind="custom", sampler=f"{__name__}:fixed_sampler")

    assert resolve_sampler(data) is fixed_sampler


def test_custom_kind_with_an_unresolvable_path_is_rejected():
    with pytest.raises(UnknownKind):
        resolve_sampler(InitialData(kind="custom", sampler="no.such.module:sampler"))


def test_builtin_kinds_are_listed():
    assert set(KINDS) == {"uniform_maxwellian", "perturbed_maxwellian", "two_stream", "custom"}


@pytest.mark.parametrize("kind", ["uniform_maxwellian", "perturbed_maxwellian", "two_stream"])
def test_sampling_is_deterministic_in_the_seed(kind):
    cfg = SimConfig(grid=TorusGrid(2, 16), n_particles=500, dt=1e-3, t_final=0.01, seed=9)
    data = InitialData(kind=kind)

    first = sample_initial(cfg, data)
    second = sample_initial(cfg, data)

    np.testing.assert_array_equal(first.positions, second.positions)
    np.testing.assert_array_equal(first.velocities, second.velocities)
    assert first.n_particles == 500
    assert np.all((first.positions >= -0.5) & (first.positions < 0.5))
    assert first.rng_seed == 9


def test_uniform_maxwellian_kinetic_energy():
    cfg = SimConfig(grid=TorusGrid(1, 64), n_particles=100_000, dt=1e-3, t_final=0.01, seed=1)

    ensemble = sample_initial(cfg, InitialData(kind="uniform_maxwellian", temperature=1.0))

    assert 0.5 * empirical_moment(ensemble, 2.0) == pytest.approx(0.5, abs=0.01)


def test_perturbed_positions_follow_the_cosine_profile():
    cfg = SimConfig(grid=TorusGrid(1, 64), n_particles=200_000, dt=1e-3, t_final=0.01, seed=2)

    ensemble = sample_initial(cfg, InitialData(amplitude=0.5, mode=1))

    first_mode = np.mean(np.cos(2 * np.pi * ensemble.positions[:, 0]))
    assert first_mode == pytest.approx(0.25, abs=0.01)


def test_two_stream_beams_drift_apart():
    cfg = SimConfig(grid=TorusGrid(1, 64), n_particles=10_000, dt=1e-3, t_final=0.01)

    ensemble = sample_initial(cfg, InitialData(kind="two_stream", drift=2.0, temperature=0.01))

    velocities = ensemble.velocities[:, 0]
    assert np.mean(velocities[0::2]) == pytest.approx(2.0, abs=0.05)
    assert np.mean(velocities[1::2]) == pytest.approx(-2.0, abs=0.05)


def test_decay_check_returns_the_empirical_moment():
    cfg = SimConfig(grid=TorusGrid(1, 32), n_particles=1000, dt=1e-3, t_final=0.01)
    data = InitialData(m0=4.0)
    ensemble = sample_initial(cfg, data)

    assert check_decay(ensemble, data) == pytest.approx(empirical_moment(ensemble, 4.0))


def test_run_rejects_a_cfl_violation_before_any_field_solve():
    cfg = SimConfig(grid=TorusGrid(1, 64), n_particles=1000, dt=0.05, t_final=1.0)

    with patch("plasma.vpme.particles.simulation.Simulation") as simulation:
        with pytest.raises(CFLViolation):
            run(cfg, InitialData())

    simulation.assert_not_called()


def small_config(**overrides):
    values = dict(grid=TorusGrid(1, 32), n_particles=2000, dt=1e-3, t_final=0.02,
                  output_every=5, mollifier_r=1 / 8)
    values.update(overrides)
    return SimConfig(**values)


def test_run_records_diagnostics_every_output_interval():
    result = run(small_config(), InitialData(temperature=0.25))

    assert [record.time for record in result.records] == pytest.approx([0.0, 0.005, 0.01,
                                                                       0.015, 0.02])
    assert result.ensemble.n_particles == 2000


def test_diagnostics_only_run_leaves_the_ensemble_unchanged():
    cfg = small_config(dt=0.0)
    data = InitialData(temperature=0.25)

    result = run(cfg, data)

    assert len(result.records) == 1
    np.testing.assert_allclose(result.ensemble.positions, sample_initial(cfg, data).positions,
                               atol=1e-15)


def test_leapfrog_is_time_reversible():
    cfg = small_config()
    ensemble = sample_initial(cfg, InitialData(temperature=0.25))
    forward = Simulation(cfg, ensemble)
    for _ in range(cfg.n_steps):
        forward.advance()

    reversed_start = forward.ensemble.with_state(forward.ensemble.positions,
                                                 -forward.ensemble.velocities)
    backward = Simulation(cfg, reversed_start)
    for _ in range(cfg.n_steps):
        backward.advance()

    gap = torus_displacement(backward.ensemble.positions, ensemble.positions)
    assert np.max(np.abs(gap)) < 1e-8
    np.testing.assert_allclose(-backward.ensemble.velocities, ensemble.velocities, atol=1e-8)


def test_regularised_energy_is_nearly_conserved():
    cfg = small_config(n_particles=20_000, grid=TorusGrid(1, 64), t_final=0.05)

    records = run(cfg, InitialData(temperature=0.25)).records

    initial = records[0].total
    drift = max(abs(record.total - initial) for record in records) / abs(initial)
    assert drift < 1e-3


def test_doubling_the_output_interval_halves_the_records():
    data = InitialData(temperature=0.25)

    often = run(small_config(output_every=5), data).records
    rarely = run(small_config(output_every=10), data).records

    assert len(often) - 1 == 2 * (len(rarely) - 1)
    assert [record.time for record in rarely] == pytest.approx([0.0, 0.01, 0.02])


def test_uniform_lattice_streams_freely():
    # Given
    cfg = small_config(n_particles=32, mollifier_r=None, t_final=0.01)
    positions = cfg.grid.axis.reshape(-1, 1)
    ensemble = ParticleEnsemble.equal_weights(positions, np.full((32, 1), 0.5))
    simulation = Simulation(cfg, ensemble)

    # When
    for _ in range(cfg.n_steps):
        simulation.advance()

    # Then
    expected = positions + 0.5 * cfg.n_steps * cfg.dt
    assert np.max(np.abs(torus_displacement(simulation.ensemble.positions, expected))) < 1e-12
    np.testing.assert_allclose(simulation.ensemble.velocities, 0.5, atol=1e-12)
