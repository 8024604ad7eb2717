"""
Numerical checks of the potential stability inequalities.

- Loeper: ||grad Ubar1 - grad Ubar2||^2 <= max_i ||h_i||_inf W2^2(h1, h2), d = 1.
- Uhat stability: ||grad Uhat1 - grad Uhat2||^2 <= (A^3 / 4) ||Ubar1 - Ubar2||^2 with
  A = exp(max_i ||Ubar_i||_inf + max_i ||Uhat_i||_inf).


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
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.domain import ScalarField, TorusGrid, gradient
from plasma.vpme.field_solver import FieldSolver
from plasma.vpme.mollifier import Mollifier
from plasma.vpme.transport.circle import w2_densities_1d

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -RELATIVE_SLACK * self.rhs

    def to_dict(self) -> Dict[str, float]:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "passed": self.passed}


def _fresh_solver() -> FieldSolver:
    # No warm start: equal inputs give bit-identical potentials.
    return FieldSolver(warm_start=False)


def loeper_inequality_check(h1: ScalarField, h2: ScalarField,
                            solver: Optional[FieldSolver] = None) -> InequalityReport:
    """
    :raises ValueError: unless both densities live on a one-dimensional grid.
    :raises NonUnitMass: if a density does not have unit mean.
    """
    if h1.grid.dim != 1:
        raise ValueError("The Loeper check needs the exact circle W2, available for d = 1 only")
    solver = solver or _fresh_solver()
    u1 = solver.solve_linear_poisson(h1)
    u2 = solver.solve_linear_poisson(h2)
    lhs = (gradient(u1) - gradient(u2)).squared_l2_norm()
    w2 = w2_densities_1d(h1, h2)
    rhs = max(h1.sup_norm(), h2.sup_norm()) * w2 ** 2
    return InequalityReport(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class UhatStabilityReport(InequalityReport):
    a_constant: float = 1.0
    ubar_gap: float = 0.0

    @property
    def ratio(self) -> float:
        """lhs / ||Ubar1 - Ubar2||^2; 0 when the linear parts coincide."""
        return self.lhs / self.ubar_gap if self.ubar_gap > 0.0 else 0.0

    def to_dict(self) -> Dict[str, float]:
        data = super().to_dict()
        data.update(a_constant=self.a_constant, ubar_gap=self.ubar_gap)
        return data


def uhat_stability_check(h1: ScalarField, h2: ScalarField) -> UhatStabilityReport:
    """
    Each density is solved by its own solver without warm start, so equal
    densities give bit-identical potentials and both sides vanish.
    """
    first = _fresh_solver().solve_fields(h1)
    second = _fresh_solver().solve_fields(h2)
    a_constant = math.exp(
        max(first.u_bar.sup_norm(), second.u_bar.sup_norm())
        + max(first.u_hat.sup_norm(), second.u_hat.sup_norm())
    )
    ubar_difference = first.u_bar - second.u_bar
    ubar_gap = ubar_difference.inner(ubar_difference)
    lhs = (first.e_hat - second.e_hat).squared_l2_norm()
    return UhatStabilityReport(
        lhs=lhs, rhs=0.25 * a_constant ** 3 * ubar_gap,
        a_constant=a_constant, ubar_gap=ubar_gap,
    )


def random_density(grid: TorusGrid, rng: np.random.Generator,
                   mollifier: Optional[Mollifier] = None, contrast: float = 0.9) -> ScalarField:
    """
    Random positive unit-mean density.

    Uniform noise in [1 - contrast, 1 + contrast] is smoothed by ``mollifier``
    when given and renormalised to unit mean.
    """
    if not 0.0 <= contrast < 1.0:
        raise ValueError(f"contrast must lie in [0, 1), got {contrast}")
    values = 1.0 + contrast * rng.uniform(-1.0, 1.0, size=grid.shape)
    density = ScalarField(grid, values)
    if mollifier is not None:
        density = mollifier.convolve(density)
    values = np.maximum(density.values, 0.0)
    return ScalarField(grid, values / np.mean(values))


@dataclass
class SweepReport:
    """Outcome of one inequality check over many density pairs."""
    name: str
    reports: List[InequalityReport] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.reports)

    @property
    def violations(self) -> int:
        return sum(1 for report in self.reports if not report.passed)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def worst_relative_margin(self) -> float:
        """min over trials of margin / rhs; inf when every rhs is 0."""
        ratios = [report.margin / report.rhs for report in self.reports if report.rhs > 0.0]
        return min(ratios) if ratios else math.inf

    def to_dict(self) -> Dict:
        return {
            "name": self.name, "trials": self.trials, "violations": self.violations,
            "passed": self.passed, "worst_relative_margin": self.worst_relative_margin,
        }


def inequality_sweep(name: str, check: Callable[[ScalarField, ScalarField], InequalityReport],
                     pairs: Iterable[Tuple[ScalarField, ScalarField]]) -> SweepReport:
    sweep = SweepReport(name)
    for h1, h2 in pairs:
        report = check(h1, h2)
        if not report.passed:
            logger.warning("%s violated: lhs=%.6e rhs=%.6e", name, report.lhs, report.rhs)
        sweep.reports.append(report)
    logger.info("%s: %d trials, %d violations", name, sweep.trials, sweep.violations)
    return sweep


def random_pairs(grid: TorusGrid, rng: np.random.Generator, trials: int,
                 mollifier: Optional[Mollifier] = None):
    """Yields ``trials`` independent pairs of random densities."""
    for _ in range(trials):
        yield random_density(grid, rng, mollifier), random_density(grid, rng, mollifier)


@dataclass(frozen=True)
class StructureReport:
    """
    Total potential gaps ||grad U1 - grad U2||^2 along a family of densities
    approaching a base density, with the matching circle W2 when d = 1.
    """
    epsilons: Tuple[float, ...]
    gaps: Tuple[float, ...]
    distances: Tuple[float, ...]

    @property
    def finite(self) -> bool:
        return all(math.isfinite(gap) for gap in self.gaps)

    @property
    def monotone(self) -> bool:
        """Gaps shrink (weakly) along the family."""
        return all(later <= earlier for earlier, later in zip(self.gaps, self.gaps[1:]))

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.update(finite=self.finite, monotone=self.monotone)
        return data


def ustab_structure(base: ScalarField, target: ScalarField,
                    epsilons: Sequence[float] = (0.5, 0.25, 0.125, 0.0625)) -> StructureReport:
    """
    Shrinking-perturbation family h_eps = (1 - eps) base + eps target with
    decreasing eps. Only finiteness and monotone decay of the total potential
    gap are assertable; the composite bound has no explicit constant.
    """
    if list(epsilons) != sorted(epsilons, reverse=True):
        raise ValueError("epsilons must decrease along the family")
    reference = _fresh_solver().solve_fields(base)
    gaps, distances = [], []
    for epsilon in epsilons:
        member = base * (1.0 - epsilon) + target * epsilon
        member = ScalarField(member.grid, member.values / member.mean())
        solution = _fresh_solver().solve_fields(member)
        gaps.append((reference.e_total - solution.e_total).squared_l2_norm())
        if base.grid.dim == 1:
            distances.append(w2_densities_1d(base, member))
    return StructureReport(tuple(epsilons), tuple(gaps), tuple(distances))
