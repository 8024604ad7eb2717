"""
Exact Wasserstein distances between equally weighted particle ensembles.

The phase-space metric is d((x, v), (y, w))^2 = torus(x, y)^2 + |v - w|^2.


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
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import TooLarge
from plasma.vpme.core.threads import worker_count
from plasma.vpme.domain import torus_displacement
from plasma.vpme.particles import ParticleEnsemble

logger = logging.getLogger(__name__)

EXACT_LIMIT = 4096
COST_BLOCK_ROWS = 512
EQUAL_WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Coupling:
    """
    Optimal pairing between two ensembles of N equally weighted particles:
    particle i of the first ensemble is sent to particle ``pairing[i]`` of
    the second, each pair carrying mass 1/N.
    """
    pairing: np.ndarray
    cost: float

    @property
    def n_particles(self) -> int:
        return self.pairing.shape[0]

    def plan(self) -> np.ndarray:
        """Dense transport plan; rows and columns each sum to 1/N."""
        n = self.n_particles
        plan = np.zeros((n, n))
        plan[np.arange(n), self.pairing] = 1.0 / n
        return plan


def squared_cost_matrix(a: ParticleEnsemble, b: ParticleEnsemble,
                        workers: Optional[int] = None) -> np.ndarray:
    """Squared phase-space distances, assembled in row blocks."""
    n = a.n_particles
    cost = np.empty((n, b.n_particles))

    def fill(start):
        stop = min(start + COST_BLOCK_ROWS, n)
        dx = torus_displacement(a.positions[start:stop, None, :], b.positions[None, :, :])
        dv = a.velocities[start:stop, None, :] - b.velocities[None, :, :]
        cost[start:stop] = np.sum(dx ** 2, axis=-1) + np.sum(dv ** 2, axis=-1)

    starts = range(0, n, COST_BLOCK_ROWS)
    workers = workers or worker_count()
    if workers == 1 or len(starts) == 1:
        for start in starts:
            fill(start)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    return cost


def _check_exact_regime(a: ParticleEnsemble, b: ParticleEnsemble):
    if a.n_particles != b.n_particles:
        raise ValueError(
            f"Exact assignment needs equal particle counts, got {a.n_particles} and {b.n_particles}"
        )
    if a.dim != b.dim:
        raise ValueError("Ensembles live in different dimensions")
    if a.n_particles > EXACT_LIMIT:
        raise TooLarge(a.n_particles, EXACT_LIMIT)
    uniform = 1.0 / a.n_particles
    for ensemble in (a, b):
        if np.max(np.abs(ensemble.weights - uniform)) > EQUAL_WEIGHT_TOLERANCE:
            raise ValueError("Exact assignment needs equally weighted particles")


def optimal_coupling(a: ParticleEnsemble, b: ParticleEnsemble, power: int = 2) -> Coupling:
    """
    Optimal assignment for the cost distance^power, power in {1, 2}.

    The matched costs are summed in sorted order, so swapping the two
    ensembles yields the same floating point value.

    :raises TooLarge: above the exact regime of 4096 particles.
    """
    if power not in (1, 2):
        raise ValueError(f"Only W1 and W2 are supported, got power={power}")
    _check_exact_regime(a, b)
    cost = squared_cost_matrix(a, b)
    if power == 1:
        cost = np.sqrt(cost)
    rows, columns = linear_sum_assignment(cost)
    matched = np.sort(cost[rows, columns])
    total = float(np.sum(matched)) / a.n_particles
    return Coupling(pairing=columns[np.argsort(rows)], cost=total)


def w2_ensembles_exact(a: ParticleEnsemble, b: ParticleEnsemble) -> float:
    return math.sqrt(optimal_coupling(a, b, power=2).cost)


def w1_ensembles_exact(a: ParticleEnsemble, b: ParticleEnsemble) -> float:
    return optimal_coupling(a, b, power=1).cost


def coupling_cost(a: ParticleEnsemble, b: ParticleEnsemble) -> float:
    """sum_p w_p (torus(X1_p, X2_p)^2 + |V1_p - V2_p|^2) for the identity pairing."""
    dx = torus_displacement(a.positions, b.positions)
    dv = a.velocities - b.velocities
    return float(np.sum(a.weights * (np.sum(dx ** 2, axis=1) + np.sum(dv ** 2, axis=1))))


@dataclass(frozen=True)
class SubsampledEstimate:
    """
    W2 of a paired subsample of two identically indexed ensembles.

    The identity pairing restricted to the subsample couples the two
    sub-ensembles, so w2_squared <= subsample_cost <= full_cost + band.
    """
    w2_squared: float
    subsample_cost: float
    full_cost: float
    sample_size: int

    @property
    def w2(self) -> float:
        return math.sqrt(self.w2_squared)

    @property
    def band(self) -> float:
        return abs(self.subsample_cost - self.full_cost)


def w2_ensembles_subsampled(a: ParticleEnsemble, b: ParticleEnsemble, rng: np.random.Generator,
                            size: int = EXACT_LIMIT) -> SubsampledEstimate:
    """Exact W2 on a uniformly drawn subsample of at most ``size`` particle pairs."""
    if a.n_particles != b.n_particles:
        raise ValueError("Paired subsampling needs identically indexed ensembles")
    full_cost = coupling_cost(a, b)
    if a.n_particles > size:
        indices = np.sort(rng.choice(a.n_particles, size=size, replace=False))
        a, b = a.subset(indices), b.subset(indices)
    return SubsampledEstimate(
        w2_squared=optimal_coupling(a, b).cost,
        subsample_cost=coupling_cost(a, b),
        full_cost=full_cost,
        sample_size=a.n_particles,
    )
