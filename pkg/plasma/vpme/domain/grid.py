"""
Periodic torus geometry and grid-sampled fields.

The torus is the unit cube [-1/2, 1/2)^d with opposite faces identified,
so its total volume is exactly 1 and a probability density has mean 1.
Grid nodes sit at x_j = -1/2 + j * spacing, j = 0 .. cells_per_dim - 1,
which puts the origin on node cells_per_dim / 2 of every axis.


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

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from plasma.vpme.core.exceptions import GridMismatch, NonFiniteField, UnsupportedGrid

SUPPORTED_DIMENSIONS = (1, 2)
MIN_CELLS_PER_DIM = 8
ZERO_MEAN_TOLERANCE = 1e-12

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid over [-1/2, 1/2)^d."""
    dim: int
    cells_per_dim: int

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMENSIONS:
            raise UnsupportedGrid(
                f"Torus dimension {self.dim} is not supported, "
                f"expected one of {SUPPORTED_DIMENSIONS}"
            )
        cells = self.cells_per_dim
        if cells < MIN_CELLS_PER_DIM or cells & (cells - 1):
            raise UnsupportedGrid(
                f"cells_per_dim must be a power of two >= {MIN_CELLS_PER_DIM}, got {cells}"
            )

    @property
    def spacing(self) -> float:
        return 1.0 / self.cells_per_dim

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cells_per_dim,) * self.dim

    @property
    def n_points(self) -> int:
        return self.cells_per_dim ** self.dim

    @property
    def origin_index(self) -> Tuple[int, ...]:
        """Multi-index of the node at x = 0."""
        return (self.cells_per_dim // 2,) * self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return -0.5 + np.arange(self.cells_per_dim) * self.spacing

    @cached_property
    def mesh(self) -> Tuple[np.ndarray, ...]:
        """Node coordinates, one array of ``shape`` per dimension."""
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def points(self) -> np.ndarray:
        """Node coordinates as an (n_points, dim) array in row-major order."""
        return np.stack([coordinate.ravel() for coordinate in self.mesh], axis=-1)

    @cached_property
    def distance_to_origin(self) -> np.ndarray:
        """Torus distance of every node to the origin, shaped like the grid."""
        return np.sqrt(sum(coordinate ** 2 for coordinate in self.mesh))

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros(self.shape))

    def constant(self, value: float) -> "ScalarField":
        return ScalarField(self, np.full(self.shape, float(value)))

    def sample(self, function) -> "ScalarField":
        """Samples ``function(*mesh)`` on the grid nodes."""
        values = np.broadcast_to(np.asarray(function(*self.mesh), dtype=float), self.shape)
        return ScalarField(self, np.array(values))


def _check_same_grid(first: TorusGrid, second: TorusGrid):
    if first != second:
        raise GridMismatch(f"Fields live on different grids: {first} and {second}")


def _as_grid_array(grid: TorusGrid, values) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.size != grid.n_points:
        raise GridMismatch(
            f"Expected {grid.n_points} values for {grid}, got {array.size}"
        )
    array = array.reshape(grid.shape)
    if not np.all(np.isfinite(array)):
        raise NonFiniteField("Field values must be finite")
    return array


@dataclass
class ScalarField:
    """Real function sampled on the nodes of a torus grid."""
    grid: TorusGrid
    values: np.ndarray
    zero_mean: bool = False

    def __post_init__(self):
        self.values = _as_grid_array(self.grid, self.values)
        if self.zero_mean and abs(self.mean()) > ZERO_MEAN_TOLERANCE:
            raise ValueError(f"Field flagged zero-mean has mean {self.mean()!r}")

    def mean(self) -> float:
        return float(np.mean(self.values))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def lp_norm(self, p: float) -> float:
        if np.isinf(p):
            return self.sup_norm()
        return float((np.sum(np.abs(self.values) ** p) * self.grid.cell_volume) ** (1.0 / p))

    def inner(self, other: "ScalarField") -> float:
        """Grid L2 inner product."""
        _check_same_grid(self.grid, other.grid)
        return float(np.sum(self.values * other.values) * self.grid.cell_volume)

    def __add__(self, other: Union["ScalarField", float]) -> "ScalarField":
        if isinstance(other, ScalarField):
            _check_same_grid(self.grid, other.grid)
            return ScalarField(self.grid, self.values + other.values)
        return ScalarField(self.grid, self.values + float(other))

    def __sub__(self, other: Union["ScalarField", float]) -> "ScalarField":
        if isinstance(other, ScalarField):
            _check_same_grid(self.grid, other.grid)
            return ScalarField(self.grid, self.values - other.values)
        return ScalarField(self.grid, self.values - float(other))

    def __radd__(self, other: float) -> "ScalarField":
        return ScalarField(self.grid, float(other) + self.values)

    def __rsub__(self, other: float) -> "ScalarField":
        return ScalarField(self.grid, float(other) - self.values)

    def __mul__(self, scalar: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values, zero_mean=self.zero_mean)


@dataclass
class VectorField:
    """Vector function sampled on the nodes of a torus grid, one array per component."""
    grid: TorusGrid
    components: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.components) != self.grid.dim:
            raise GridMismatch(
                f"Expected {self.grid.dim} components, got {len(self.components)}"
            )
        self.components = tuple(_as_grid_array(self.grid, c) for c in self.components)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "VectorField":
        return cls(grid, tuple(np.zeros(grid.shape) for _ in range(grid.dim)))

    def magnitude(self) -> np.ndarray:
        return np.sqrt(sum(c ** 2 for c in self.components))

    def sup_norm(self) -> float:
        return float(np.max(self.magnitude()))

    def squared_l2_norm(self) -> float:
        return float(sum(np.sum(c ** 2) for c in self.components) * self.grid.cell_volume)

    def stacked(self) -> np.ndarray:
        """Values as an (n_points, dim) array in row-major node order."""
        return np.stack([c.ravel() for c in self.components], axis=-1)

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self.grid, other.grid)
        return VectorField(self.grid, tuple(
            a + b for a, b in zip(self.components, other.components)
        ))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self.grid, other.grid)
        return VectorField(self.grid, tuple(
            a - b for a, b in zip(self.components, other.components)
        ))

    def __neg__(self) -> "VectorField":
        return VectorField(self.grid, tuple(-c for c in self.components))


def wrap_positions(x: ArrayLike) -> np.ndarray:
    """Reduces coordinates into [-1/2, 1/2)."""
    wrapped = np.mod(np.asarray(x, dtype=float) + 0.5, 1.0) - 0.5
    # np.mod can round a tiny negative input up to exactly 1.0
    return np.where(wrapped >= 0.5, wrapped - 1.0, wrapped)


def torus_displacement(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Shortest displacement x - y on the torus, componentwise in [-1/2, 1/2]."""
    difference = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return difference - np.round(difference)


def torus_distance(x: ArrayLike, y: ArrayLike) -> Union[float, np.ndarray]:
    """
    Distance between points on the torus.

    Points are scalars (d = 1) or arrays whose last axis holds the
    coordinates, so ``(N, d)`` arrays give N distances.

    :returns: inf over integer shifts of the Euclidean distance, at most sqrt(d) / 2.
    """
    displacement = torus_displacement(x, y)
    if displacement.ndim == 0:
        return float(abs(displacement))
    distance = np.sqrt(np.sum(displacement ** 2, axis=-1))
    return float(distance) if distance.ndim == 0 else distance
