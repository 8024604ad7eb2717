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

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plasma.vpme.cli.verification import LOG_LIPSCHITZ_CONSTANT
from plasma.vpme.core.exceptions import DomainError
from plasma.vpme.diagnostics import (
    CSV_COLUMNS, UE_LOWER_BOUND, PhaseSpaceDensity, critical_exponent, density_lp, energy,
    energy_density_bound, interpolation_check, interpolation_constant, log_lipschitz_modulus,
    log_lipschitz_probe, moment, moment_growth_bound, record, write_diagnostics_csv
)
from plasma.vpme.domain import ScalarField, TorusGrid
from plasma.vpme.field_solver import solve_fields
from plasma.vpme.particles import ParticleEnsemble, deposit


@pytest.fixture
def ensemble():
    rng = np.random.default_rng(6)
    return ParticleEnsemble.equal_weights(rng.random((4000, 1)) - 0.5,
                                          rng.normal(0.0, 0.5, size=(4000, 1)))


@pytest.fixture
def grid():
    return TorusGrid(1, 32)


def test_moments_of_a_two_particle_ensemble():
    ensemble = ParticleEnsemble.equal_weights(np.array([0.0, 0.1]), np.array([1.0, -2.0]))

    assert moment(ensemble, 0.0) == pytest.approx(1.0)
    assert moment(ensemble, 2.0) == pytest.approx(2.5)
    assert moment(ensemble, 4.0) == pytest.approx(8.5)


def test_negative_moment_order_is_rejected(ensemble):
    with pytest.raises(ValueError):
        moment(ensemble, -1.0)


def test_energy_parts(ensemble, grid):
    solution = solve_fields(deposit(ensemble, grid))

    parts = energy(ensemble, solution)

    assert parts.kinetic == pytest.approx(0.5 * moment(ensemble, 2.0))
    assert parts.field_energy >= 0.0
    assert parts.ue_term >= UE_LOWER_BOUND
    assert parts.total == pytest.approx(parts.kinetic + parts.field_energy + parts.ue_term)


def test_record_and_csv(ensemble, grid, tmp_path):
    rho = deposit(ensemble, grid)
    current = record(0.5, ensemble, rho, solve_fields(rho), m0=6.0)

    path = write_diagnostics_csv(tmp_path / "diagnostics.csv", [current, current])

    assert set(current.moments) == {2.0, 4.0, 6.0}
    assert current.rho_lp == pytest.approx(density_lp(rho, 3.0))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert lines[1].startswith("0.5,")


@pytest.mark.parametrize("dim, expected", [(1, 3.0), (2, 2.0)])
def test_critical_exponent(dim, expected):
    assert critical_exponent(dim) == expected


def test_density_lp_needs_p_at_least_one(grid):
    with pytest.raises(ValueError):
        density_lp(grid.constant(1.0), 0.5)


def test_interpolation_constant_closed_form():
    # d = 1, (m, k) = (2, 0): a = 2, C = 3/2 * 2^(2/3) * 2^(1/3)
    assert interpolation_constant(1, 2.0, 0.0) == pytest.approx(3.0)


@pytest.mark.parametrize("m, k", [(2.0, 2.0), (2.0, 3.0), (4.0, -1.0)])
def test_interpolation_needs_k_below_m(m, k):
    with pytest.raises(DomainError):
        interpolation_constant(1, m, k)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=0, max_value=2 ** 32 - 1),
    st.sampled_from([(2.0, 0.0), (4.0, 1.0), (4.0, 2.0)]),
    st.sampled_from([1, 2]),
)
def test_interpolation_inequality_holds_on_random_densities(seed, exponents, dim):
    rng = np.random.default_rng(seed)
    grid = TorusGrid(dim, 8)
    n_v = 16 if dim == 1 else 8
    g = PhaseSpaceDensity(grid, 4.0, rng.random(grid.shape + (n_v,) * dim) ** 3)

    check = interpolation_check(g, *exponents)

    assert check.passed
    assert 0.0 < check.ratio <= 1.0 + 1e-9


def test_phase_space_histogram_keeps_the_mass(ensemble, grid):
    g = PhaseSpaceDensity.from_ensemble(ensemble, grid, v_max=4.0, n_v=32)

    mass = np.sum(g.values) * grid.cell_volume * g.dv
    assert mass == pytest.approx(1.0)


def test_interpolation_check_of_an_ensemble_needs_binning_parameters(ensemble, grid):
    with pytest.raises(ValueError):
        interpolation_check(ensemble, 2.0, 0.0, grid=grid)

    assert interpolation_check(ensemble, 2.0, 0.0, grid=grid, v_max=4.0, n_v=32).passed


def test_phase_space_density_must_be_non_negative(grid):
    with pytest.raises(ValueError):
        PhaseSpaceDensity(grid, 1.0, -np.ones(grid.shape + (4,)))


def test_log_lipschitz_modulus_at_the_largest_distance():
    distance = np.array([math.sqrt(2) / 2])

    np.testing.assert_allclose(log_lipschitz_modulus(distance, 2), distance)


def test_log_lipschitz_probe(ensemble, grid):
    rho = deposit(ensemble, grid)
    e_bar = solve_fields(rho).e_bar

    ratio = log_lipschitz_probe(e_bar, rho.sup_norm(), n_pairs=500, seed=1)

    assert math.isfinite(ratio) and ratio > 0.0
    assert log_lipschitz_probe(e_bar, 0.0, n_pairs=10, seed=1) == 0.0
    with pytest.raises(ValueError):
        log_lipschitz_probe(e_bar, 1.0, n_pairs=0, seed=1)


def test_moment_growth_bound():
    assert moment_growth_bound(2.0, 1.0, 4.0) == pytest.approx(10 * 2.0 * 2.0 ** 6)


def test_energy_density_bound_grows_with_energy():
    low = energy_density_bound(0.5, 2, 1.0)
    high = energy_density_bound(2.0, 2, 1.0)

    assert 0.0 < low < high


def smooth_e_bar(cells):
    grid = TorusGrid(1, cells)
    rho = grid.sample(lambda x: 1.0 + 0.5 * np.cos(2 * np.pi * x))
    return solve_fields(rho).e_bar, rho.sup_norm()


def test_log_lipschitz_probe_is_stable_under_refinement():
    coarse = log_lipschitz_probe(*smooth_e_bar(128), n_pairs=4000, seed=3)
    fine = log_lipschitz_probe(*smooth_e_bar(512), n_pairs=4000, seed=3)

    # the supremum 2 / (3 pi) is reached by antipodal nodes at x = +-1/4
    assert coarse == pytest.approx(2 / (3 * math.pi), rel=0.1)
    assert fine == pytest.approx(coarse, rel=0.1)
    assert max(coarse, fine) <= 2 / (3 * math.pi) + 1e-9


@pytest.mark.parametrize("width", [0.01, 0.03])
def test_log_lipschitz_probe_of_a_narrow_bump_stays_calibrated(width):
    grid = TorusGrid(1, 512)
    bump = np.exp(-0.5 * (grid.distance_to_origin / width) ** 2)
    rho = ScalarField(grid, bump / np.mean(bump))

    ratio = log_lipschitz_probe(solve_fields(rho).e_bar, rho.sup_norm(), n_pairs=4000, seed=5)

    assert math.isfinite(ratio)
    assert 0.0 < ratio <= LOG_LIPSCHITZ_CONSTANT + 1e-6


def test_density_norm_stays_below_the_energy_bound(ensemble, grid):
    rho = deposit(ensemble, grid)
    parts = energy(ensemble, solve_fields(rho))
    g = PhaseSpaceDensity.from_ensemble(ensemble, grid, v_max=4.0, n_v=32)

    bound = energy_density_bound(parts.total, 1, float(np.max(g.values)))

    assert density_lp(rho, critical_exponent(1)) <= bound
