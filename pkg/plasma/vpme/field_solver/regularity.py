"""
Regularity quantities of a field solve.


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
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from plasma.vpme.domain import ScalarField, VectorField, gradient
from plasma.vpme.field_solver.poisson import FieldSolution


@dataclass(frozen=True)
class RegularityReport:  # pylint: disable=too-many-instance-attributes
    ubar_sup: float
    ubar_grad_sup: float
    uhat_sup: float
    uhat_c1_bound: float
    ehat_lipschitz: float
    density_lp_norm: float
    density_sup: float

    def bound_holds(self, constant: float) -> bool:
        """sup|Uhat| <= exp(C (1 + ||rho||_p)) for the given C."""
        return self.uhat_sup <= math.exp(constant * (1.0 + self.density_lp_norm))

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def lipschitz_probe(field: VectorField) -> float:
    """Largest forward difference quotient of ``field`` along the grid axes."""
    spacing = field.grid.spacing
    worst = 0.0
    for component in field.components:
        for axis in range(field.grid.dim):
            difference = np.roll(component, -1, axis=axis) - component
            worst = max(worst, float(np.max(np.abs(difference))) / spacing)
    return worst


def regularity_report(rho: ScalarField, sol: FieldSolution) -> RegularityReport:
    exponent = (rho.grid.dim + 2) / rho.grid.dim
    uhat_gradient = gradient(sol.u_hat)
    uhat_sup = sol.u_hat.sup_norm()
    report = RegularityReport(
        ubar_sup=sol.u_bar.sup_norm(),
        ubar_grad_sup=gradient(sol.u_bar).sup_norm(),
        uhat_sup=uhat_sup,
        uhat_c1_bound=uhat_sup + uhat_gradient.sup_norm(),
        ehat_lipschitz=lipschitz_probe(uhat_gradient),
        density_lp_norm=rho.lp_norm(exponent),
        density_sup=rho.sup_norm(),
    )
    if not all(math.isfinite(value) and value >= 0.0 for value in asdict(report).values()):
        raise ValueError(f"Regularity report holds non-finite values: {report}")
    return report
