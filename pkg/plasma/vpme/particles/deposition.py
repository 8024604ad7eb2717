"""
Cloud-in-cell charge deposition and its adjoint field interpolation.


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

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np

from plasma.vpme.core.threads import worker_count
from plasma.vpme.domain import ScalarField, TorusGrid, VectorField, wrap_positions
from plasma.vpme.particles.ensemble import ParticleEnsemble

# Fixed chunk boundaries keep the reduction order independent of the worker count.
DEPOSIT_CHUNK_SIZE = 1 << 16


def cic_stencil(grid: TorusGrid, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Node indices and linear weights of every particle.

    :param positions: (N, d) array of wrapped positions.
    :returns: flat node indices and weights, both of shape (N, 2^d).
    """
    n = grid.cells_per_dim
    scaled = (positions + 0.5) / grid.spacing
    lower = np.floor(scaled)
    fraction = scaled - lower
    lower = lower.astype(np.int64) % n

    strides = [n ** (grid.dim - 1 - axis) for axis in range(grid.dim)]
    indices, weights = [], []
    for corner in itertools.product((0, 1), repeat=grid.dim):
        index = np.zeros(positions.shape[0], dtype=np.int64)
        weight = np.ones(positions.shape[0])
        for axis, offset in enumerate(corner):
            index += ((lower[:, axis] + offset) % n) * strides[axis]
            weight *= fraction[:, axis] if offset else 1.0 - fraction[:, axis]
        indices.append(index)
        weights.append(weight)
    return np.stack(indices, axis=1), np.stack(weights, axis=1)


def _deposit_chunk(grid: TorusGrid, positions: np.ndarray, weights: np.ndarray) -> np.ndarray:
    indices, stencil = cic_stencil(grid, positions)
    return np.bincount(indices.ravel(), weights=(stencil * weights[:, None]).ravel(),
                       minlength=grid.n_points)


def deposit(ens: ParticleEnsemble, grid: TorusGrid, workers: Optional[int] = None) -> ScalarField:
    """
    Linear (cloud-in-cell) density on the grid nodes, with grid mean sum(w) = 1.

    Particles are processed in fixed-size chunks whose partial densities are
    added in chunk order, so the result is bit-identical for any worker count.
    """
    positions = wrap_positions(ens.positions)
    starts = range(0, ens.n_particles, DEPOSIT_CHUNK_SIZE)

    def partial(start):
        stop = start + DEPOSIT_CHUNK_SIZE
        return _deposit_chunk(grid, positions[start:stop], ens.weights[start:stop])

    workers = workers or worker_count()
    if workers == 1 or len(starts) == 1:
        partials = [partial(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(partial, starts))

    total = np.zeros(grid.n_points)
    for density in partials:
        total += density
    return ScalarField(grid, total / grid.cell_volume)


def interpolate_field(E: VectorField, x) -> np.ndarray:  # pylint: disable=invalid-name
    """
    Field values at arbitrary points with the deposition stencil.

    :param x: one point (scalar for d = 1, or a length-d vector) or an (N, d) array.
    :returns: a length-d vector for one point, otherwise an (N, d) array.
    """
    grid = E.grid
    points = np.asarray(x, dtype=float)
    single = points.ndim == 0 or (points.ndim == 1 and points.size == grid.dim)
    points = wrap_positions(points.reshape(-1, grid.dim))
    indices, weights = cic_stencil(grid, points)
    values = E.stacked()[indices]
    result = np.einsum("pc,pcd->pd", weights, values)
    return result[0] if single else result
