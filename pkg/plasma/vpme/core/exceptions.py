"""
Exceptions raised by the VPME simulator and its verification harness.


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

from typing import Optional


class VPMEError(Exception):
    """
    Every error raised by this package is this type.
    """


class ConfigError(VPMEError):
    """Base class for configuration errors."""


class ParseError(ConfigError):
    """Raised when a configuration file can not be parsed."""

    def __init__(self, line: Optional[int], reason: str):
        self.line = line
        self.reason = reason
        location = f"line {line}" if line is not None else "unknown line"
        super().__init__(f"{location}: {reason}")


class UnknownKey(ConfigError):
    """Raised when a configuration file contains a key outside the schema."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown configuration key: {name!r}")


class CFLViolation(ConfigError):
    """Raised when the time step breaks the CFL sanity bound."""

    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(f"dt={dt!r} exceeds the CFL sanity bound {bound!r}")


class UnknownKind(ConfigError):
    """Raised when initial data of an unknown kind is requested."""

    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"Unknown initial data kind: {kind!r}")


class GridError(VPMEError):
    """Base class for grid and field errors."""


class UnsupportedGrid(GridError):
    """Raised when a grid has an unsupported dimension or cell count."""


class GridMismatch(GridError):
    """Raised when two fields living on different grids are combined."""


class NonFiniteField(GridError):
    """Raised when a field holds NaN or infinite values."""


class NonUnitMass(VPMEError):
    """Raised when a density does not have unit mean."""

    def __init__(self, mean: float):
        self.mean = mean
        super().__init__(f"Density must have unit mean, got {mean!r}")


class MassMismatch(VPMEError):
    """Raised when two densities compared by optimal transport have different masses."""


class UnresolvableWidth(VPMEError):
    """Raised when a mollifier is too narrow for the grid."""

    def __init__(self, r: float, spacing: float):
        self.r = r
        self.spacing = spacing
        super().__init__(f"Mollifier width r={r!r} is below 2 * spacing = {2 * spacing!r}")


class TooLarge(VPMEError):
    """Raised when an exact transport problem exceeds the exact regime."""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(
            f"{n} particles exceed the exact assignment limit of {limit}; "
            "use the subsampled estimate instead"
        )


class DomainError(VPMEError):
    """Raised when moment exponents are outside the interpolation range."""


class NoConvergence(VPMEError):
    """Raised when the nonlinear Poisson solve does not reach its tolerance."""

    def __init__(self, iters: int, residual: float):
        self.iters = iters
        self.residual = residual
        super().__init__(
            f"Newton solve did not converge after {iters} iterations "
            f"(residual {residual:.3e})"
        )


class VerificationFailure(VPMEError):
    """Raised when an in-scenario assertion fails."""
