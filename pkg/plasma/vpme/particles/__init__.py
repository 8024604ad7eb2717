"""
Particle representation of the ion distribution and the time loop.


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
from .config import SimConfig
from .deposition import cic_stencil, deposit, interpolate_field
from .ensemble import ParticleEnsemble, read_ensemble_snapshot, write_ensemble_snapshot
from .initial_data import (
    KINDS, InitialData, check_decay, empirical_moment, resolve_sampler, sample_initial
)
from .simulation import ForceEvaluation, RunResult, Simulation, run, step

__all__ = [
    "SimConfig", "ParticleEnsemble", "InitialData", "KINDS",
    "sample_initial", "resolve_sampler", "check_decay", "empirical_moment",
    "deposit", "interpolate_field", "cic_stencil",
    "Simulation", "ForceEvaluation", "RunResult", "step", "run",
    "read_ensemble_snapshot", "write_ensemble_snapshot",
]
