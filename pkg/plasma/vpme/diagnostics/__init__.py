"""
Energy functionals, velocity moments, density norms and field probes.


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
from .energy import (
    CSV_COLUMNS, UE_LOWER_BOUND, DiagnosticsRecord, EnergyParts, critical_exponent,
    density_lp, energy, energy_density_bound, moment, moment_growth_bound, record,
    write_diagnostics_csv
)
from .interpolation import (
    InterpolationCheck, PhaseSpaceDensity, interpolation_check, interpolation_constant
)
from .modulus import log_lipschitz_modulus, log_lipschitz_probe

__all__ = [
    "DiagnosticsRecord", "EnergyParts", "CSV_COLUMNS", "UE_LOWER_BOUND",
    "energy", "moment", "density_lp", "critical_exponent", "record",
    "write_diagnostics_csv", "energy_density_bound", "moment_growth_bound",
    "PhaseSpaceDensity", "InterpolationCheck", "interpolation_check", "interpolation_constant",
    "log_lipschitz_probe", "log_lipschitz_modulus",
]
