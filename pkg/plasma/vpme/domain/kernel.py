"""
Green's function of the negative Laplacian on the torus and its Coulomb kernel.


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

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import fft

from plasma.vpme.domain.grid import ScalarField, TorusGrid, VectorField
from plasma.vpme.domain.spectral import backward, spectral_symbols


@dataclass(frozen=True)
class CoulombKernelView:
    """
    Samples of G and K = -grad G in node layout.

    The node at the origin carries the truncated spectral value of the
    singular kernel; it is flagged by ``origin_index`` and excluded by
    ``regular_mask``.
    """
    grid: TorusGrid
    green: ScalarField
    values: VectorField
    singular_exponent: int
    origin_index: Tuple[int, ...]

    @property
    def regular_mask(self) -> np.ndarray:
        mask = np.ones(self.grid.shape, dtype=bool)
        mask[self.origin_index] = False
        return mask

    def magnitude(self) -> np.ndarray:
        return self.values.magnitude()

    def scaled_magnitude(self) -> np.ndarray:
        """|K(x)| * |x|^(d-1) on regular nodes, 0 at the origin."""
        distance = self.grid.distance_to_origin
        scaled = np.zeros(self.grid.shape)
        mask = self.regular_mask
        scaled[mask] = self.magnitude()[mask] * distance[mask] ** self.singular_exponent
        return scaled

    def mirrored(self) -> VectorField:
        """K(-x) on every node."""
        return VectorField(self.grid, tuple(
            _mirror(component) for component in self.values.components
        ))


def _mirror(values: np.ndarray) -> np.ndarray:
    # node j <-> node (n - j) mod n is the pair x <-> -x
    return np.roll(np.flip(values), 1, axis=tuple(range(values.ndim)))


@lru_cache(maxsize=16)
def coulomb_kernel(grid: TorusGrid) -> CoulombKernelView:
    """
    Zero-mean G solving -Laplacian(G) = delta - 1 and K = -grad G.

    The discrete delta is the unit impulse divided by the cell volume, so
    its forward coefficients are 1 on every mode and G has coefficients
    1/|k|^2 away from k = 0.
    """
    symbols = spectral_symbols(grid)
    green_coefficients = -symbols.inverse_laplacian

    def to_nodes(coefficients):
        return fft.fftshift(backward(grid, coefficients))

    green = to_nodes(green_coefficients)
    kernel = tuple(
        to_nodes(-symbol * green_coefficients) for symbol in symbols.derivative
    )
    return CoulombKernelView(
        grid=grid,
        green=ScalarField(grid, green - np.mean(green), zero_mean=True),
        values=VectorField(grid, kernel),
        singular_exponent=grid.dim - 1,
        origin_index=grid.origin_index,
    )
