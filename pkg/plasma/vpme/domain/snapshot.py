"""
Plain text field snapshots.

A snapshot is one header line ``# torus d=<dim> n=<cells>`` followed by
the row-major node values, one per line, with 17 significant digits.


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
from pathlib import Path
from typing import List, Union

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import ParseError
from plasma.vpme.domain.grid import ScalarField, TorusGrid, VectorField

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(r"^#\s*torus\s+d=(\d+)\s+n=(\d+)\s*$")
COMPONENT_NAMES = ("x", "y")
VALUE_FORMAT = "%.17g"

PathLike = Union[str, Path]


def format_header(grid: TorusGrid) -> str:
    return f"# torus d={grid.dim} n={grid.cells_per_dim}"


def write_field_snapshot(path: PathLike, field: ScalarField) -> Path:
    path = Path(path)
    np.savetxt(path, field.values.ravel(), fmt=VALUE_FORMAT,
               header=format_header(field.grid), comments="")
    logger.debug("Wrote field snapshot %s", path)
    return path


def read_field_snapshot(path: PathLike) -> ScalarField:
    """
    Reads a snapshot written by :func:`write_field_snapshot`.

    :raises ParseError: if the header is missing or malformed, or if the body
        does not hold one number per grid node.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as snapshot:
            header = snapshot.readline().strip()
    except UnicodeDecodeError as exc:
        raise ParseError(1, f"field snapshot {path} is not text: {exc}") from exc
    match = HEADER_PATTERN.match(header)
    if not match:
        raise ParseError(1, f"invalid field snapshot header {header!r} in {path}")

    grid = TorusGrid(dim=int(match.group(1)), cells_per_dim=int(match.group(2)))
    try:
        values = np.loadtxt(path, comments="#", ndmin=1)
    except ValueError as exc:
        raise ParseError(None, f"invalid field snapshot body in {path}: {exc}") from exc
    if values.ndim != 1 or values.size != grid.n_points:
        raise ParseError(None, f"expected {grid.n_points} values, one per line, in {path}, "
                               f"got an array of shape {values.shape}")
    return ScalarField(grid, values)


def write_vector_snapshot(directory: PathLike, stem: str, field: VectorField) -> List[Path]:
    """Writes one snapshot per component as ``<stem>_<component>.txt``."""
    directory = Path(directory)
    return [
        write_field_snapshot(directory / f"{stem}_{name}.txt", ScalarField(field.grid, component))
        for name, component in zip(COMPONENT_NAMES, field.components)
    ]
