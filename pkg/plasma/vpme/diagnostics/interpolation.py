"""
Moment interpolation inequality on gridded phase-space functions.

For g >= 0 on T^d x R^d with l_k(x) = int |v|^k g(x, v) dv and 0 <= k < m,

    || l_k ||_{(m+d)/(k+d)} <= C(d, m, k) ||g||_inf^((m-k)/(m+d)) ||l_m||_1^((k+d)/(m+d)).


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
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np
from scipy.special import gamma

from plasma.vpme.core.exceptions import DomainError
from plasma.vpme.domain import TorusGrid

if TYPE_CHECKING:
    from plasma.vpme.particles.ensemble import ParticleEnsemble

RELATIVE_SLACK = 1e-9


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d = 1, 2 pi for d = 2)."""
    return 2.0 * math.pi ** (dim / 2.0) / gamma(dim / 2.0)


def interpolation_constant(dim: int, m: float, k: float) -> float:
    """
    Closed-form C(d, m, k).

    Split the velocity integral at radius R. With G = sup_v g(x, .) and
    a = |S^(d-1)| / (k + d),

        l_k(x) <= G a R^(k+d) + R^(k-m) l_m(x) =: phi(R).

    phi'(R) = 0 at R*^(m+d) = (m - k) l_m / (G a (k + d)), where
    phi(R*) = G a R*^(k+d) (m + d) / (m - k). Substituting R*,

        l_k(x) <= C G^((m-k)/(m+d)) l_m(x)^((k+d)/(m+d)),
        C = (m + d) / (m - k) * a^((m-k)/(m+d)) * ((m - k) / (k + d))^((k+d)/(m+d)).

    Raising to p = (m + d) / (k + d), integrating in x and using
    G <= ||g||_inf gives the inequality with this C.

    :raises DomainError: unless 0 <= k < m.
    """
    if not 0 <= k < m:
        raise DomainError(f"Interpolation needs 0 <= k < m, got k={k}, m={m}")
    d = float(dim)
    a = sphere_area(dim) / (k + d)
    return (
        (m + d) / (m - k)
        * a ** ((m - k) / (m + d))
        * ((m - k) / (k + d)) ** ((k + d) / (m + d))
    )


@dataclass
class PhaseSpaceDensity:
    """
    Non-negative g(x, v) on the torus grid times a velocity box.

    ``values`` has shape grid.shape + (n_v,) * d; velocity cells are centred
    at -v_max + (i + 1/2) dv.
    """
    grid: TorusGrid
    v_max: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        dim = self.grid.dim
        if self.values.ndim != 2 * dim or self.values.shape[:dim] != self.grid.shape:
            raise ValueError(f"Expected values of shape {self.grid.shape} + (n_v,)*{dim}")
        if np.any(self.values < 0.0) or not np.all(np.isfinite(self.values)):
            raise ValueError("Phase-space density must be finite and non-negative")

    @property
    def n_v(self) -> int:
        return self.values.shape[-1]

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n_v

    @cached_property
    def speed(self) -> np.ndarray:
        """|v| at the velocity cell centres, shaped (n_v,) * d."""
        centres = -self.v_max + (np.arange(self.n_v) + 0.5) * self.dv
        mesh = np.meshgrid(*([centres] * self.grid.dim), indexing="ij")
        return np.sqrt(sum(component ** 2 for component in mesh))

    def velocity_moment(self, order: float) -> np.ndarray:
        """l_order(x) on the spatial grid."""
        axes = tuple(range(self.grid.dim, 2 * self.grid.dim))
        weight = self.speed ** order * self.dv ** self.grid.dim
        return np.sum(self.values * weight, axis=axes)

    @classmethod
    def from_ensemble(cls, ensemble: "ParticleEnsemble", grid: TorusGrid, v_max: float,
                      n_v: int) -> "PhaseSpaceDensity":
        """
        Nearest-node histogram of an ensemble; particles with a velocity
        component outside [-v_max, v_max) are dropped.
        """
        dim = grid.dim
        n = grid.cells_per_dim
        dv = 2.0 * v_max / n_v
        x_index = np.floor((ensemble.positions + 0.5) / grid.spacing + 0.5).astype(np.int64) % n
        v_index = np.floor((ensemble.velocities + v_max) / dv).astype(np.int64)
        inside = np.all((v_index >= 0) & (v_index < n_v), axis=1)

        shape = grid.shape + (n_v,) * dim
        flat = np.ravel_multi_index(
            tuple(x_index[inside].T) + tuple(v_index[inside].T), shape
        )
        counts = np.bincount(flat, weights=ensemble.weights[inside], minlength=int(np.prod(shape)))
        values = counts.reshape(shape) / (grid.cell_volume * dv ** dim)
        return cls(grid, v_max, values)


@dataclass(frozen=True)
class InterpolationCheck:
    lhs: float
    rhs: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else 0.0


def interpolation_sides(g: PhaseSpaceDensity, m: float, k: float) -> Tuple[float, float]:
    dim = g.grid.dim
    constant = interpolation_constant(dim, m, k)
    exponent = (m + dim) / (k + dim)
    cell_volume = g.grid.cell_volume
    lhs = float(np.sum(g.velocity_moment(k) ** exponent) * cell_volume) ** (1.0 / exponent)
    l_m = float(np.sum(g.velocity_moment(m)) * cell_volume)
    sup = float(np.max(g.values))
    rhs = constant * sup ** ((m - k) / (m + dim)) * l_m ** ((k + dim) / (m + dim))
    return lhs, rhs


def interpolation_check(g, m: float, k: float, *, grid: Optional[TorusGrid] = None,
                        v_max: Optional[float] = None,
                        n_v: Optional[int] = None) -> InterpolationCheck:
    """
    Evaluates both sides of the interpolation inequality.

    :param g: a :class:`PhaseSpaceDensity`, or a particle ensemble binned on
        ``grid`` times ``n_v`` velocity cells per axis over [-v_max, v_max).
    :raises DomainError: unless 0 <= k < m.
    """
    if not 0 <= k < m:
        raise DomainError(f"Interpolation needs 0 <= k < m, got k={k}, m={m}")
    if not isinstance(g, PhaseSpaceDensity):
        if grid is None or v_max is None or n_v is None:
            raise ValueError("Binning an ensemble needs grid, v_max and n_v")
        g = PhaseSpaceDensity.from_ensemble(g, grid, v_max, n_v)
    lhs, rhs = interpolation_sides(g, m, k)
    return InterpolationCheck(lhs, rhs, lhs <= rhs * (1.0 + RELATIVE_SLACK))
