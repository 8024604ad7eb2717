"""
Spectral differential operators on the torus.

Fourier coefficients use the convention where the forward transform
carries the 1/N factor (``norm="forward"``), so the zero mode of a field
is its grid mean. First derivatives drop the Nyquist mode, which has no
real-valued derivative on an even grid; the Laplacian keeps it.


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
from typing import Optional, Tuple

import numpy as np
from scipy import fft

from plasma.vpme.core.threads import worker_count
from plasma.vpme.domain.grid import ScalarField, TorusGrid, VectorField, _check_same_grid


@dataclass(frozen=True)
class SpectralSymbols:
    """Fourier multipliers of a grid in real-FFT layout."""
    wavevectors: Tuple[np.ndarray, ...]
    derivative: Tuple[np.ndarray, ...]
    laplacian: np.ndarray
    inverse_laplacian: np.ndarray


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=32)
def spectral_symbols(grid: TorusGrid) -> SpectralSymbols:
    """Returns the (cached, read-only) Fourier multipliers of ``grid``."""
    n = grid.cells_per_dim
    coefficient_shape = grid.shape[:-1] + (n // 2 + 1,)
    wavevectors, derivative = [], []
    for axis in range(grid.dim):
        last = axis == grid.dim - 1
        modes = fft.rfftfreq(n, 1.0 / n) if last else fft.fftfreq(n, 1.0 / n)
        broadcast = [1] * grid.dim
        broadcast[axis] = -1
        modes = modes.reshape(broadcast)
        k = np.broadcast_to(2.0 * np.pi * modes, coefficient_shape).copy()
        wavevectors.append(_read_only(k))
        nyquist = np.broadcast_to(np.abs(modes) == n // 2, coefficient_shape)
        derivative.append(_read_only(np.where(nyquist, 0.0, 1j * k)))

    laplacian = -sum(k ** 2 for k in wavevectors)
    inverse = np.zeros_like(laplacian)
    nonzero = laplacian != 0.0
    inverse[nonzero] = 1.0 / laplacian[nonzero]
    return SpectralSymbols(
        wavevectors=tuple(wavevectors),
        derivative=tuple(derivative),
        laplacian=_read_only(laplacian),
        inverse_laplacian=_read_only(inverse),
    )


def forward(grid: TorusGrid, values: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
    """Forward real FFT of grid values, carrying the 1/N factor."""
    return fft.rfftn(values, s=grid.shape, norm="forward",
                     workers=workers or worker_count())


def backward(grid: TorusGrid, coefficients: np.ndarray,
             workers: Optional[int] = None) -> np.ndarray:
    """Inverse of :func:`forward`."""
    return fft.irfftn(coefficients, s=grid.shape, norm="forward",
                      workers=workers or worker_count())


def apply_multiplier(f: ScalarField, multiplier: np.ndarray,
                     workers: Optional[int] = None) -> np.ndarray:
    """Multiplies the Fourier coefficients of ``f`` and returns grid values."""
    return backward(f.grid, multiplier * forward(f.grid, f.values, workers), workers)


def laplacian(f: ScalarField, workers: Optional[int] = None) -> ScalarField:
    """Exact spectral Laplacian on the resolved modes of the grid."""
    symbols = spectral_symbols(f.grid)
    return ScalarField(f.grid, apply_multiplier(f, symbols.laplacian, workers))


def inverse_laplacian(f: ScalarField, workers: Optional[int] = None) -> ScalarField:
    """
    Zero-mean solution u of Laplacian(u) = f - mean(f).

    :returns: a field flagged zero-mean.
    """
    symbols = spectral_symbols(f.grid)
    values = apply_multiplier(f, symbols.inverse_laplacian, workers)
    return ScalarField(f.grid, values - np.mean(values), zero_mean=True)


def gradient(f: ScalarField, workers: Optional[int] = None) -> VectorField:
    symbols = spectral_symbols(f.grid)
    coefficients = forward(f.grid, f.values, workers)
    return VectorField(f.grid, tuple(
        backward(f.grid, symbol * coefficients, workers) for symbol in symbols.derivative
    ))


def divergence(v: VectorField, workers: Optional[int] = None) -> ScalarField:
    symbols = spectral_symbols(v.grid)
    coefficients = sum(
        symbol * forward(v.grid, component, workers)
        for symbol, component in zip(symbols.derivative, v.components)
    )
    return ScalarField(v.grid, backward(v.grid, coefficients, workers))


def convolve_with(kernel_coefficients: np.ndarray, f: ScalarField,
                  workers: Optional[int] = None) -> ScalarField:
    """
    Periodic convolution with a kernel given by its forward coefficients.

    With the forward transform carrying 1/N, the coefficients of
    ``sum_i a_i b_(j-i) * cell_volume`` are the product of the coefficients
    of a and b, so no extra factor appears here.
    """
    return ScalarField(f.grid, apply_multiplier(f, kernel_coefficients, workers))


def same_grid(*fields) -> TorusGrid:
    """Returns the common grid of ``fields`` or raises GridMismatch."""
    grid = fields[0].grid
    for other in fields[1:]:
        _check_same_grid(grid, other.grid)
    return grid
