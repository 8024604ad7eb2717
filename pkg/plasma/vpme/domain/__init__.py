"""
Periodic torus geometry, grid-sampled fields and spectral operators.


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
from .grid import (
    ScalarField, TorusGrid, VectorField, torus_displacement, torus_distance, wrap_positions
)
from .kernel import CoulombKernelView, coulomb_kernel
from .snapshot import read_field_snapshot, write_field_snapshot, write_vector_snapshot
from .spectral import divergence, gradient, inverse_laplacian, laplacian

__all__ = [
    "TorusGrid", "ScalarField", "VectorField",
    "torus_distance", "torus_displacement", "wrap_positions",
    "laplacian", "gradient", "divergence", "inverse_laplacian",
    "CoulombKernelView", "coulomb_kernel",
    "read_field_snapshot", "write_field_snapshot", "write_vector_snapshot",
]
