"""
Mollifiers used by the regularised system.


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
from .mollifier import (
    KernelBoundReport, Mollifier, bump, convolve, make_mollifier, regularised_kernel_bound
)

__all__ = [
    "Mollifier", "KernelBoundReport", "bump", "convolve", "make_mollifier",
    "regularised_kernel_bound",
]
