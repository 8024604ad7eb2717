"""
Log-Lipschitz continuity probe of the linear field part.


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

import numpy as np

from plasma.vpme.domain import VectorField, torus_distance

MIN_SEPARATION_IN_CELLS = 2


def log_lipschitz_modulus(distance: np.ndarray, dim: int) -> np.ndarray:
    """r (1 + log(sqrt(d) / (2 r)))."""
    return distance * (1.0 + np.log(math.sqrt(dim) / (2.0 * distance)))


def log_lipschitz_probe(e_bar: VectorField, rho_sup: float, n_pairs: int, seed: int) -> float:
    """
    Worst ratio |E(x) - E(y)| / (rho_sup * modulus(|x - y|)) over random
    node pairs at least two cells apart.
    """
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be positive, got {n_pairs}")
    if rho_sup == 0.0 or e_bar.sup_norm() == 0.0:
        return 0.0

    grid = e_bar.grid
    rng = np.random.default_rng(seed)
    first = rng.integers(0, grid.n_points, size=n_pairs)
    second = rng.integers(0, grid.n_points, size=n_pairs)
    points = grid.points
    distance = torus_distance(points[first], points[second])
    resolved = distance >= MIN_SEPARATION_IN_CELLS * grid.spacing
    if not np.any(resolved):
        return 0.0

    values = e_bar.stacked()
    difference = np.linalg.norm(values[first[resolved]] - values[second[resolved]], axis=1)
    scale = rho_sup * log_lipschitz_modulus(distance[resolved], grid.dim)
    return float(np.max(difference / scale))
