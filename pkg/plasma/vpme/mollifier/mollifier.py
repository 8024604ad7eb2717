"""
Scaled mollifiers and periodic convolution.


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
from typing import Dict, Iterable, List, Tuple

import numpy as np
from scipy import fft

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import UnresolvableWidth
from plasma.vpme.domain import ScalarField, TorusGrid, VectorField, coulomb_kernel
from plasma.vpme.domain.spectral import convolve_with, forward, same_grid

logger = logging.getLogger(__name__)

MAX_WIDTH = 0.25
MIN_WIDTH_IN_CELLS = 2


def bump(s: np.ndarray) -> np.ndarray:
    """Standard smooth bump exp(-1 / (1 - s^2)) on s < 1, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    values = np.zeros_like(s)
    inside = s < 1.0
    values[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return values


@dataclass(frozen=True)
class Mollifier:
    """
    chi_r sampled on the grid nodes (origin on the centre node) together
    with its Fourier multiplier.
    """
    grid: TorusGrid
    r: float
    values: ScalarField
    transfer: np.ndarray

    def mass(self) -> float:
        return self.values.integral()

    def convolve(self, f: ScalarField) -> ScalarField:
        return convolve(self, f)

    def convolve_vector(self, v: VectorField) -> VectorField:
        same_grid(self.values, v)
        return VectorField(v.grid, tuple(
            convolve(self, ScalarField(v.grid, component)).values for component in v.components
        ))


@lru_cache(maxsize=32)
def make_mollifier(grid: TorusGrid, r: float) -> Mollifier:
    """
    Samples chi_r and renormalises it to unit discrete mass. Mollifiers are
    cached per (grid, r) and shared, so their arrays are read-only.

    :raises ValueError: if r is outside (0, 1/4].
    :raises UnresolvableWidth: if r < 2 * spacing.
    """
    if not 0.0 < r <= MAX_WIDTH:
        raise ValueError(f"Mollifier width must lie in (0, {MAX_WIDTH}], got {r!r}")
    if r < MIN_WIDTH_IN_CELLS * grid.spacing:
        raise UnresolvableWidth(r, grid.spacing)

    samples = bump(grid.distance_to_origin / r)
    samples /= np.sum(samples) * grid.cell_volume
    values = ScalarField(grid, samples)
    values.values.setflags(write=False)

    transfer = forward(grid, fft.ifftshift(samples)).real
    # the zero mode is the discrete mass, exactly 1 after renormalisation
    transfer.flat[0] = 1.0
    transfer.setflags(write=False)

    logger.debug("Built mollifier r=%s on %s", r, grid)
    return Mollifier(grid=grid, r=float(r), values=values, transfer=transfer)


def convolve(m: Mollifier, f: ScalarField) -> ScalarField:
    """
    Periodic convolution chi_r * f by spectral multiplication.

    :raises GridMismatch: if ``f`` lives on another grid.
    """
    same_grid(m.values, f)
    return convolve_with(m.transfer, f)


@dataclass(frozen=True)
class KernelBoundReport:
    """B(r) = sup over x != 0 of |chi_r * K(x)| / (1 + |x|^-(d-1))."""
    dim: int
    cells_per_dim: int
    entries: Tuple[Tuple[float, float], ...]

    @property
    def bounds(self) -> List[float]:
        return [bound for _, bound in self.entries]

    def worst_to_first_ratio(self) -> float:
        """max_r B(r) relative to the bound of the first (widest) r."""
        first = self.entries[0][1]
        return max(self.bounds) / first if first > 0 else float("inf")

    def to_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "cells_per_dim": self.cells_per_dim,
            "bounds": [{"r": r, "B": bound} for r, bound in self.entries],
            "worst_to_first_ratio": self.worst_to_first_ratio(),
        }


def regularised_kernel_bound(grid: TorusGrid, r_list: Iterable[float]) -> KernelBoundReport:
    kernel = coulomb_kernel(grid)
    mask = kernel.regular_mask
    weight = 1.0 + grid.distance_to_origin[mask] ** (-(grid.dim - 1))
    entries = []
    for r in r_list:
        mollified = make_mollifier(grid, r).convolve_vector(kernel.values)
        bound = float(np.max(mollified.magnitude()[mask] / weight))
        logger.debug("Regularised kernel bound B(%s) = %s", r, bound)
        entries.append((float(r), bound))
    return KernelBoundReport(grid.dim, grid.cells_per_dim, tuple(entries))
