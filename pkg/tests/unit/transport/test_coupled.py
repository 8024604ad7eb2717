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
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from plasma.vpme.domain import TorusGrid
from plasma.vpme.particles import InitialData, ParticleEnsemble, SimConfig
from plasma.vpme.transport import (
    STABILITY_COLUMNS, CoupledRecord, CoupledRunState, Perturbation, coupled_run,
    coupled_run_async, gronwall_fit, write_stability_csv
)


@pytest.fixture
def cfg():
    return SimConfig(grid=TorusGrid(1, 32), n_particles=300, dt=1e-3, t_final=0.01,
                     output_every=5, mollifier_r=1 / 8, seed=4)


@pytest.fixture
def data():
    return InitialData(temperature=0.25)


def test_perturbation_shifts_the_first_coordinate():
    ensemble = ParticleEnsemble.equal_weights(np.zeros((3, 2)), np.zeros((3, 2)))

    shifted = Perturbation(displacement=0.1, velocity=-0.2).apply(ensemble)

    np.testing.assert_allclose(shifted.positions[:, 0], 0.1)
    np.testing.assert_allclose(shifted.positions[:, 1], 0.0)
    np.testing.assert_allclose(shifted.velocities[:, 0], -0.2)


def test_zero_perturbation_returns_a_copy():
    ensemble = ParticleEnsemble.equal_weights(np.zeros((3, 1)), np.zeros((3, 1)))

    copy = Perturbation(0.0).apply(ensemble)

    assert Perturbation(0.0).is_zero
    assert copy is not ensemble
    np.testing.assert_array_equal(copy.positions, ensemble.positions)


def test_coupled_state_measures_the_identity_pairing():
    first = ParticleEnsemble.equal_weights(np.zeros((2, 1)), np.zeros((2, 1)))
    second = ParticleEnsemble.equal_weights(np.full((2, 1), 0.1), np.full((2, 1), 0.2))

    state = CoupledRunState(first, second)

    assert state.d_value == pytest.approx(0.05)


def test_coupled_state_needs_identically_indexed_ensembles():
    with pytest.raises(ValueError):
        CoupledRunState(
            ParticleEnsemble.equal_weights(np.zeros((2, 1)), np.zeros((2, 1))),
            ParticleEnsemble.equal_weights(np.zeros((3, 1)), np.zeros((3, 1))),
        )


@pytest.mark.asyncio
async def test_coupled_run_records_every_output_time(cfg, data):
    # When
    with ThreadPoolExecutor(max_workers=2) as executor:
        result = await coupled_run_async(cfg, data, Perturbation(1e-4), executor=executor)

    # Then
    assert [record.t for record in result.records] == pytest.approx([0.0, 0.005, 0.01])
    assert result.records[0].d_value == pytest.approx(1e-8, rel=1e-6)
    assert all(record.coupling_bound_holds for record in result.records)
    assert all(record.band == 0.0 for record in result.records)
    assert result.max_d < 1e-2
    assert result.final_state.d_value == pytest.approx(result.records[-1].d_value)


@pytest.mark.asyncio
async def test_zero_perturbation_keeps_the_trajectories_together(cfg, data):
    result = await coupled_run_async(cfg, data, Perturbation(0.0))

    assert all(record.d_value < 1e-20 for record in result.records)
    assert all(record.i1 == 0.0 and record.i2 == 0.0 for record in result.records)


def test_coupled_run_wraps_the_event_loop(cfg, data):
    result = coupled_run(cfg, data, Perturbation(1e-4), sample_size=100)

    assert len(result.records) == 3
    assert all(record.w2_estimate >= 0.0 for record in result.records)


def gronwall_record(t, d_value):
    return CoupledRecord(t=t, d_value=d_value, w2_estimate=0.0, band=0.0,
                         i1=0.0, i2=0.0, i3=0.0, i4=0.0)


def test_gronwall_fit_recovers_a_double_exponential_rate():
    times = np.linspace(0.0, 1.0, 11)
    ceiling = math.e / 4
    records = [gronwall_record(t, ceiling * math.exp(-math.exp(2.0 - 0.5 * t))) for t in times]

    fit = gronwall_fit(records, dim=1)

    assert fit.n_points == 11
    assert fit.slope == pytest.approx(-0.5, abs=1e-9)
    assert fit.intercept == pytest.approx(2.0, abs=1e-9)
    assert fit.rate == pytest.approx(0.5, abs=1e-9)


def test_gronwall_fit_needs_two_usable_points():
    records = [gronwall_record(0.0, 0.0), gronwall_record(0.1, 1e-6), gronwall_record(0.2, 1.0)]

    fit = gronwall_fit(records, dim=1)

    assert fit.n_points == 1
    assert fit.slope == 0.0
    assert fit.to_dict()["rate"] == 0.0


def test_stability_csv_columns(tmp_path):
    path = write_stability_csv(tmp_path / "stability.csv", [gronwall_record(0.0, 0.125)])

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(STABILITY_COLUMNS)
    assert lines[1].split(",")[1] == "0.125"
