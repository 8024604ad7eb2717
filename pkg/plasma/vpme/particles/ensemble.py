"""
Weighted particle ensembles and their text snapshots.


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

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import ParseError
from plasma.vpme.domain import wrap_positions

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-12
HEADER_PATTERN = re.compile(r"^#\s*particles\s+n=(\d+)\s+d=(\d+)\s+seed=(-?\d+)\s*$")
VALUE_FORMAT = "%.17g"


def _as_points(values, n_particles=None) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise ValueError(f"Expected an (N, d) array, got shape {array.shape}")
    if n_particles is not None and array.shape[0] != n_particles:
        raise ValueError(f"Expected {n_particles} rows, got {array.shape[0]}")
    return array


@dataclass
class ParticleEnsemble:
    """
    Empirical measure sum_p w_p delta(x - x_p) delta(v - v_p).

    Positions and velocities are (N, d) arrays; one-dimensional inputs are
    read as d = 1.
    """
    positions: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray
    rng_seed: int = 0

    def __post_init__(self):
        self.positions = _as_points(self.positions)
        n_particles = self.positions.shape[0]
        self.velocities = _as_points(self.velocities, n_particles)
        self.weights = np.array(self.weights, dtype=float).reshape(-1)
        if self.velocities.shape[1] != self.positions.shape[1]:
            raise ValueError("Positions and velocities must have the same dimension")
        if self.weights.shape[0] != n_particles:
            raise ValueError(f"Expected {n_particles} weights, got {self.weights.shape[0]}")
        if np.any(self.weights <= 0.0):
            raise ValueError("Particle weights must be positive")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"Particle weights must sum to 1, got {total!r}")

    @classmethod
    def equal_weights(cls, positions, velocities, rng_seed: int = 0) -> "ParticleEnsemble":
        positions = _as_points(positions)
        n_particles = positions.shape[0]
        return cls(positions, velocities, np.full(n_particles, 1.0 / n_particles), rng_seed)

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=1)

    def max_speed(self) -> float:
        return float(np.max(self.speeds())) if self.n_particles else 0.0

    def with_state(self, positions: np.ndarray, velocities: np.ndarray) -> "ParticleEnsemble":
        """Same weights and seed, new phase-space coordinates."""
        return ParticleEnsemble(positions, velocities, self.weights, self.rng_seed)

    def wrapped(self) -> "ParticleEnsemble":
        return self.with_state(wrap_positions(self.positions), self.velocities)

    def copy(self) -> "ParticleEnsemble":
        return ParticleEnsemble(self.positions.copy(), self.velocities.copy(),
                                self.weights.copy(), self.rng_seed)

    def subset(self, indices: np.ndarray) -> "ParticleEnsemble":
        """Sub-ensemble with the selected particles, weights renormalised."""
        weights = self.weights[indices]
        return ParticleEnsemble(self.positions[indices], self.velocities[indices],
                                weights / np.sum(weights), self.rng_seed)


def write_ensemble_snapshot(path: Union[str, Path], ensemble: ParticleEnsemble) -> Path:
    """Writes ``# particles n=<N> d=<dim> seed=<s>`` then ``x... v... w`` per line."""
    path = Path(path)
    rows = np.hstack([ensemble.positions, ensemble.velocities, ensemble.weights[:, None]])
    header = f"# particles n={ensemble.n_particles} d={ensemble.dim} seed={ensemble.rng_seed}"
    np.savetxt(path, rows, fmt=VALUE_FORMAT, header=header, comments="")
    logger.debug("Wrote ensemble snapshot %s", path)
    return path


def read_ensemble_snapshot(path: Union[str, Path]) -> ParticleEnsemble:
    path = Path(path)
    with open(path, encoding="utf-8") as snapshot:
        header = snapshot.readline().strip()
    match = HEADER_PATTERN.match(header)
    if not match:
        raise ParseError(1, f"invalid ensemble snapshot header {header!r} in {path}")

    n_particles, dim, seed = (int(group) for group in match.groups())
    rows = np.loadtxt(path, comments="#", ndmin=2)
    if rows.shape != (n_particles, 2 * dim + 1):
        raise ParseError(None, f"expected {n_particles} rows of {2 * dim + 1} values in {path}")
    return ParticleEnsemble(rows[:, :dim], rows[:, dim:2 * dim], rows[:, -1], seed)
