"""
Simulation configuration.


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
from typing import Optional

from plasma.vpme.core.exceptions import CFLViolation, ConfigError
from plasma.vpme.domain import TorusGrid
from plasma.vpme.field_solver.poisson import DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE

SUPPORTED_DEPOSITIONS = ("linear",)
CFL_FACTOR = 0.5


@dataclass(frozen=True)
class SimConfig:  # pylint: disable=too-many-instance-attributes
    """Parameters of one particle run."""
    grid: TorusGrid
    n_particles: int
    dt: float
    t_final: float
    seed: int = 0
    mollifier_r: Optional[float] = None
    deposition: str = "linear"
    output_every: int = 10
    newton_tol: float = DEFAULT_TOLERANCE
    newton_max_iters: int = DEFAULT_MAX_ITERS
    mollify_diagnostics: bool = False

    def __post_init__(self):
        if self.n_particles < 1:
            raise ConfigError(f"n_particles must be positive, got {self.n_particles}")
        if self.dt < 0.0 or not math.isfinite(self.dt):
            raise ConfigError(f"dt must be a finite non-negative number, got {self.dt}")
        if self.t_final < 0.0 or not math.isfinite(self.t_final):
            raise ConfigError(f"t_final must be a finite non-negative number, got {self.t_final}")
        if self.deposition not in SUPPORTED_DEPOSITIONS:
            raise ConfigError(
                f"Unsupported deposition {self.deposition!r}, expected one of "
                f"{SUPPORTED_DEPOSITIONS}"
            )
        if self.output_every < 1:
            raise ConfigError(f"output_every must be at least 1, got {self.output_every}")
        if self.newton_tol <= 0.0 or self.newton_max_iters < 1:
            raise ConfigError("Newton tolerance and iteration cap must be positive")

    @property
    def n_steps(self) -> int:
        """Number of time steps; zero for a diagnostics-only run."""
        if self.dt == 0.0:
            return 0
        return int(round(self.t_final / self.dt))

    def cfl_bound(self, v_cut: float) -> float:
        """Largest dt allowed for particles no faster than ``v_cut``."""
        if v_cut <= 0.0:
            return math.inf
        return CFL_FACTOR * self.grid.spacing / v_cut

    def validate_cfl(self, v_cut: float):
        """
        :raises CFLViolation: if dt exceeds half a cell per step at speed ``v_cut``.
        """
        bound = self.cfl_bound(v_cut)
        if self.dt > bound:
            raise CFLViolation(self.dt, bound)
