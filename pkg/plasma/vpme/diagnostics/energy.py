"""
Energy, velocity moments and density norms along a run.


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

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterable, NamedTuple, Union

import numpy as np

from plasma.vpme.diagnostics.interpolation import interpolation_constant
from plasma.vpme.domain import ScalarField, gradient
from plasma.vpme.field_solver import FieldSolution

if TYPE_CHECKING:
    from plasma.vpme.particles.ensemble import ParticleEnsemble

UE_LOWER_BOUND = -math.exp(-1.0)
CSV_COLUMNS = (
    "time", "kinetic", "field_energy", "ue_term", "total_energy",
    "m2", "m4", "m_m0", "rho_sup", "rho_lp",
)


class EnergyParts(NamedTuple):
    kinetic: float
    field_energy: float
    ue_term: float
    total: float


def energy(ens: "ParticleEnsemble", sol: FieldSolution) -> EnergyParts:
    """
    Kinetic energy, field energy 1/2 int |grad U|^2 and int U exp(U).

    For a regularised solve U is the potential U_r of the mollified system,
    so the total is the regularised energy.
    """
    kinetic = 0.5 * float(np.sum(ens.weights * np.sum(ens.velocities ** 2, axis=1)))
    potential = sol.potential
    field_energy = 0.5 * gradient(potential).squared_l2_norm()
    ue_term = float(
        np.sum(potential.values * np.exp(potential.values)) * potential.grid.cell_volume
    )
    return EnergyParts(kinetic, field_energy, ue_term, kinetic + field_energy + ue_term)


def moment(ens: "ParticleEnsemble", m: float) -> float:
    """M_m = sum_p w_p |v_p|^m."""
    if m < 0:
        raise ValueError(f"Moment order must be non-negative, got {m}")
    speeds = np.linalg.norm(ens.velocities, axis=1)
    return float(np.sum(ens.weights * speeds ** m))


def density_lp(rho: ScalarField, p: float) -> float:
    """Grid L^p norm, summed in numpy's fixed pairwise order."""
    if p < 1:
        raise ValueError(f"p must be at least 1, got {p}")
    return rho.lp_norm(p)


def critical_exponent(dim: int) -> float:
    """(d + 2) / d, the integrability of a density with finite kinetic energy."""
    return (dim + 2) / dim


@dataclass(frozen=True)
class DiagnosticsRecord:  # pylint: disable=too-many-instance-attributes
    time: float
    kinetic: float
    field_energy: float
    ue_term: float
    total: float
    moments: Dict[float, float] = field(default_factory=dict)
    rho_sup: float = 0.0
    rho_lp: float = 0.0
    m0: float = 4.0

    def as_row(self) -> Dict[str, float]:
        return {
            "time": self.time,
            "kinetic": self.kinetic,
            "field_energy": self.field_energy,
            "ue_term": self.ue_term,
            "total_energy": self.total,
            "m2": self.moments[2.0],
            "m4": self.moments[4.0],
            "m_m0": self.moments[float(self.m0)],
            "rho_sup": self.rho_sup,
            "rho_lp": self.rho_lp,
        }


def record(time: float, ens: "ParticleEnsemble", rho: ScalarField, sol: FieldSolution,
           m0: float) -> DiagnosticsRecord:
    parts = energy(ens, sol)
    orders = sorted({2.0, 4.0, float(m0)})
    return DiagnosticsRecord(
        time=time,
        kinetic=parts.kinetic,
        field_energy=parts.field_energy,
        ue_term=parts.ue_term,
        total=parts.total,
        moments={order: moment(ens, order) for order in orders},
        rho_sup=rho.sup_norm(),
        rho_lp=density_lp(rho, critical_exponent(rho.grid.dim)),
        m0=float(m0),
    )


def format_value(value: float) -> str:
    return f"{value:.17g}"


def write_diagnostics_csv(path: Union[str, Path],
                          records: Iterable[DiagnosticsRecord]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for current in records:
            row = current.as_row()
            writer.writerow([format_value(row[column]) for column in CSV_COLUMNS])
    return path


def energy_density_bound(total_energy: float, dim: int, f_sup: float) -> float:
    """
    Upper bound on ||rho||_(d+2)/d implied by the energy.

    The field energy is non-negative and int U exp(U) >= -1/e, so
    M_2 <= 2 (E + 1/e); the interpolation inequality with (m, k) = (2, 0)
    then bounds the density by the kinetic energy and sup f.
    """
    second_moment = 2.0 * (total_energy + math.exp(-1.0))
    return (
        interpolation_constant(dim, 2.0, 0.0)
        * f_sup ** (2.0 / (dim + 2))
        * second_moment ** (dim / (dim + 2))
    )


def moment_growth_bound(initial_moment: float, t: float, m0: float,
                        safety: float = 10.0) -> float:
    """safety * M_m0(0) * (1 + t)^(m0 + 2)."""
    return safety * initial_moment * (1.0 + t) ** (m0 + 2.0)
