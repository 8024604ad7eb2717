"""
Wasserstein distances, coupled runs and potential stability checks.


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
from .circle import w2_densities_1d
from .coupled import (
    STABILITY_COLUMNS, CoupledRecord, CoupledRun, CoupledRunState, GronwallFit, Perturbation,
    coupled_run, coupled_run_async, gronwall_fit, write_stability_csv
)
from .inequalities import (
    InequalityReport, StructureReport, SweepReport, UhatStabilityReport, inequality_sweep,
    loeper_inequality_check, random_density, random_pairs, uhat_stability_check, ustab_structure
)
from .wasserstein import (
    EXACT_LIMIT, Coupling, SubsampledEstimate, coupling_cost, optimal_coupling,
    w1_ensembles_exact, w2_ensembles_exact, w2_ensembles_subsampled
)

__all__ = [
    "Coupling", "SubsampledEstimate", "EXACT_LIMIT",
    "optimal_coupling", "w2_ensembles_exact", "w1_ensembles_exact",
    "w2_ensembles_subsampled", "coupling_cost", "w2_densities_1d",
    "Perturbation", "CoupledRunState", "CoupledRecord", "CoupledRun", "GronwallFit",
    "STABILITY_COLUMNS", "coupled_run", "coupled_run_async", "gronwall_fit",
    "write_stability_csv",
    "InequalityReport", "UhatStabilityReport", "SweepReport", "StructureReport",
    "loeper_inequality_check", "uhat_stability_check", "ustab_structure",
    "inequality_sweep", "random_density", "random_pairs",
]
