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
import itertools
import math

import numpy as np
import pytest

from plasma.vpme.core.exceptions import MassMismatch, TooLarge
from plasma.vpme.domain import ScalarField, TorusGrid
from plasma.vpme.particles import ParticleEnsemble
from plasma.vpme.transport import (
    EXACT_LIMIT, coupling_cost, optimal_coupling, random_density, w1_ensembles_exact,
    w2_densities_1d, w2_ensembles_exact, w2_ensembles_subsampled
)
from plasma.vpme.transport.circle import CircleQuantile, offset_costs
from plasma.vpme.transport.wasserstein import squared_cost_matrix


def random_ensemble(rng, n_particles, dim):
    return ParticleEnsemble.equal_weights(rng.uniform(-0.5, 0.5, size=(n_particles, dim)),
                                          rng.normal(size=(n_particles, dim)))


def brute_force(a, b, power=2):
    cost = squared_cost_matrix(a, b, workers=1)
    if power == 1:
        cost = np.sqrt(cost)
    n = a.n_particles
    return min(
        float(np.sum(np.sort(cost[np.arange(n), list(permutation)]))) / n
        for permutation in itertools.permutations(range(n))
    )


@pytest.mark.parametrize("seed", range(5))
def test_optimal_coupling_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    a, b = random_ensemble(rng, 6, 1), random_ensemble(rng, 6, 1)

    coupling = optimal_coupling(a, b)

    assert coupling.cost == brute_force(a, b)
    assert sorted(coupling.pairing) == list(range(6))


def test_w1_matches_brute_force():
    rng = np.random.default_rng(12)
    a, b = random_ensemble(rng, 5, 2), random_ensemble(rng, 5, 2)

    assert w1_ensembles_exact(a, b) == brute_force(a, b, power=1)


def test_coupling_plan_has_uniform_marginals():
    rng = np.random.default_rng(1)
    coupling = optimal_coupling(random_ensemble(rng, 7, 2), random_ensemble(rng, 7, 2))

    plan = coupling.plan()

    np.testing.assert_allclose(plan.sum(axis=0), 1 / 7)
    np.testing.assert_allclose(plan.sum(axis=1), 1 / 7)


def test_w2_is_symmetric_and_vanishes_on_the_diagonal():
    rng = np.random.default_rng(2)
    a, b = random_ensemble(rng, 30, 2), random_ensemble(rng, 30, 2)

    assert w2_ensembles_exact(a, b) == w2_ensembles_exact(b, a)
    assert w2_ensembles_exact(a, a) == 0.0


def test_w2_triangle_inequality():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b, c = (random_ensemble(rng, 8, 2) for _ in range(3))
        assert w2_ensembles_exact(a, c) <= \
            w2_ensembles_exact(a, b) + w2_ensembles_exact(b, c) + 1e-9


def test_w2_uses_the_torus_distance():
    a = ParticleEnsemble.equal_weights(np.array([0.45]), np.array([0.0]))
    b = ParticleEnsemble.equal_weights(np.array([-0.45]), np.array([0.0]))

    assert w2_ensembles_exact(a, b) == pytest.approx(0.1)


def test_identity_coupling_bounds_the_optimal_cost():
    rng = np.random.default_rng(4)
    a, b = random_ensemble(rng, 40, 1), random_ensemble(rng, 40, 1)

    assert coupling_cost(a, b) >= optimal_coupling(a, b).cost


def test_exact_regime_rejects_large_ensembles():
    rng = np.random.default_rng(5)
    a = random_ensemble(rng, EXACT_LIMIT + 1, 1)

    with pytest.raises(TooLarge) as error:
        optimal_coupling(a, a)

    assert error.value.limit == EXACT_LIMIT


def test_exact_regime_rejects_unequal_counts():
    rng = np.random.default_rng(6)

    with pytest.raises(ValueError):
        optimal_coupling(random_ensemble(rng, 4, 1), random_ensemble(rng, 5, 1))


def test_exact_regime_rejects_unequal_weights():
    a = ParticleEnsemble(np.zeros((2, 1)), np.zeros((2, 1)), np.array([0.25, 0.75]))

    with pytest.raises(ValueError):
        optimal_coupling(a, a)


def test_only_w1_and_w2_are_supported():
    rng = np.random.default_rng(7)
    a = random_ensemble(rng, 3, 1)

    with pytest.raises(ValueError):
        optimal_coupling(a, a, power=3)


def test_cost_matrix_is_the_same_for_any_worker_count():
    rng = np.random.default_rng(8)
    a, b = random_ensemble(rng, 1100, 2), random_ensemble(rng, 1100, 2)

    np.testing.assert_array_equal(squared_cost_matrix(a, b, workers=1),
                                  squared_cost_matrix(a, b, workers=3))


def test_subsampled_estimate_is_exact_below_the_sample_size():
    rng = np.random.default_rng(9)
    a, b = random_ensemble(rng, 50, 1), random_ensemble(rng, 50, 1)

    estimate = w2_ensembles_subsampled(a, b, np.random.default_rng(0), size=100)

    assert estimate.sample_size == 50
    assert estimate.w2_squared == optimal_coupling(a, b).cost
    assert estimate.band == 0.0


def test_subsampled_estimate_draws_paired_indices():
    rng = np.random.default_rng(10)
    a = random_ensemble(rng, 300, 1)
    b = a.with_state(a.positions, a.velocities + 0.01)

    estimate = w2_ensembles_subsampled(a, b, np.random.default_rng(0), size=64)

    assert estimate.sample_size == 64
    assert estimate.subsample_cost == pytest.approx(1e-4)
    assert estimate.full_cost == pytest.approx(1e-4)
    assert estimate.w2_squared <= estimate.subsample_cost + 1e-15


def gaussian_bump(grid, centre=0.0, width=0.01):
    distance = np.abs(grid.axis - centre)
    distance = np.minimum(distance, 1.0 - distance)
    values = np.exp(-0.5 * (distance / width) ** 2)
    return ScalarField(grid, values / np.mean(values))


@pytest.mark.parametrize("shift_cells, expected", [(64, 0.25), (26, 26 / 256), (200, 56 / 256)])
def test_circle_w2_of_a_translated_bump(shift_cells, expected):
    grid = TorusGrid(1, 256)
    first = gaussian_bump(grid)
    second = ScalarField(grid, np.roll(first.values, shift_cells))

    assert w2_densities_1d(first, second) == pytest.approx(expected, abs=1e-3)


def test_circle_w2_of_equal_densities_is_zero():
    grid = TorusGrid(1, 64)
    rho = grid.sample(lambda x: 1.0 + 0.5 * np.cos(2 * np.pi * x))

    assert w2_densities_1d(rho, rho) < 1e-12
    assert w2_densities_1d(grid.constant(1.0), grid.constant(1.0)) < 1e-12


def test_circle_w2_is_symmetric():
    grid = TorusGrid(1, 128)
    first = grid.sample(lambda x: 1.0 + 0.5 * np.cos(2 * np.pi * x))
    second = grid.sample(lambda x: 1.0 + 0.5 * np.sin(4 * np.pi * x))

    assert w2_densities_1d(first, second) == pytest.approx(w2_densities_1d(second, first),
                                                          abs=1e-6)


def test_circle_w2_needs_unit_masses():
    grid = TorusGrid(1, 64)

    with pytest.raises(MassMismatch):
        w2_densities_1d(grid.constant(1.0), grid.constant(2.0))


def test_circle_w2_is_one_dimensional():
    grid = TorusGrid(2, 16)

    with pytest.raises(ValueError):
        w2_densities_1d(grid.constant(1.0), grid.constant(1.0))


def test_quantile_of_the_uniform_density():
    grid = TorusGrid(1, 16)
    quantile = CircleQuantile.from_density(grid.constant(1.0))

    np.testing.assert_allclose(quantile(np.array([0.0, 0.25, 1.0])), [-17 / 32, -9 / 32, 15 / 32])
    assert quantile.mean == pytest.approx(-1 / 32)
    assert math.isclose(quantile.lifted(np.array([1.25]))[0], quantile(np.array([0.25]))[0] + 1)


def test_offset_costs_of_the_uniform_density():
    grid = TorusGrid(1, 16)
    quantile = CircleQuantile.from_density(grid.constant(1.0))

    # shifting a uniform quantile by alpha moves every point by alpha
    costs = offset_costs(quantile, quantile, np.array([0.0, 0.1]))

    np.testing.assert_allclose(costs, [0.0, 0.01], atol=1e-12)


@pytest.mark.parametrize("shift_cells", [26, 64, 102, 115])
def test_circle_w2_of_a_narrow_bump_with_underflowing_tails(shift_cells):
    grid = TorusGrid(1, 256)
    first = gaussian_bump(grid, width=0.01)
    second = ScalarField(grid, np.roll(first.values, shift_cells))
    assert np.any((first.values > 0.0) & (first.values < np.finfo(float).tiny))

    distance = w2_densities_1d(first, second)

    assert math.isfinite(distance)
    assert distance == pytest.approx(shift_cells / 256, abs=1e-3)


def test_quantile_levels_skip_cells_without_resolvable_mass():
    grid = TorusGrid(1, 256)
    bump = gaussian_bump(grid, width=0.01)

    quantile = CircleQuantile.from_density(bump)
    costs = offset_costs(quantile, quantile, np.array([0.0, 0.25, -0.25]))

    assert np.all(np.diff(quantile.levels) > 0.0)
    assert quantile.levels[0] == 0.0 and quantile.levels[-1] == 1.0
    assert quantile.starts.shape[0] < grid.cells_per_dim
    assert np.all(np.isfinite(costs))
    assert costs[0] == 0.0
    assert np.all(costs[1:] > 0.0)


def test_circle_w2_is_at_most_the_identity_cut_cost():
    rng = np.random.default_rng(21)
    grid = TorusGrid(1, 128)

    for _ in range(5):
        first, second = random_density(grid, rng), random_density(grid, rng)
        identity_cut = offset_costs(CircleQuantile.from_density(first),
                                    CircleQuantile.from_density(second), np.array([0.0]))[0]

        assert w2_densities_1d(first, second) ** 2 <= identity_cut + 1e-12
