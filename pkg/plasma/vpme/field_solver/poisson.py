"""
Split electrostatic solve for the massless electron model.

The potential U solving Laplacian(U) = exp(U) - rho is split as U = Ubar + Uhat
with Laplacian(Ubar) = 1 - rho (zero mean) and Laplacian(Uhat) = exp(Ubar + Uhat) - 1.
The second equation is the Euler-Lagrange equation of the convex functional

    E[h] = integral of 1/2 |grad h|^2 + exp(Ubar + h) - h,

which the nonlinear solve minimises with damped Newton steps.


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

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import NoConvergence, NonUnitMass
from plasma.vpme.domain import ScalarField, TorusGrid, VectorField, gradient, inverse_laplacian
from plasma.vpme.domain.spectral import backward, forward, spectral_symbols
from plasma.vpme.mollifier import Mollifier

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERS = 50
MASS_TOLERANCE = 1e-10
CG_RTOL = 1e-12
CG_MAX_ITERS = 500
ARMIJO_SLOPE = 1e-4
MIN_STEP = 2.0 ** -40
# objective values closer than this (relative) are indistinguishable in floating point
OBJECTIVE_ROUNDOFF = 1e-14


@dataclass
class FieldSolution:  # pylint: disable=too-many-instance-attributes
    """Output of one split field solve."""
    u_bar: ScalarField
    u_hat: ScalarField
    e_bar: VectorField
    e_hat: VectorField
    newton_iters: int
    final_residual: float
    objective_history: Tuple[float, ...] = field(default_factory=tuple)
    mollified: bool = False

    @property
    def grid(self) -> TorusGrid:
        return self.u_bar.grid

    @property
    def potential(self) -> ScalarField:
        """U = Ubar + Uhat."""
        return self.u_bar + self.u_hat

    @property
    def e_total(self) -> VectorField:
        return self.e_bar + self.e_hat

    def electron_mass(self) -> float:
        """Grid integral of exp(U), 1 for a converged solve."""
        return float(np.sum(np.exp(self.potential.values)) * self.grid.cell_volume)


@dataclass(frozen=True)
class NewtonReport:
    iterations: int
    residual: float
    objective_history: Tuple[float, ...]


class FieldSolver:
    """
    Stateful field solver.

    Keeps the last Uhat as the starting point of the next nonlinear solve
    on the same grid, so that successive solves along a simulation need
    only one or two Newton iterations. Instances must not be shared
    between threads.
    """

    def __init__(
            self, tolerance: float = DEFAULT_TOLERANCE, max_iters: int = DEFAULT_MAX_ITERS,
            cg_rtol: float = CG_RTOL, workers: Optional[int] = None, warm_start: bool = True
    ):
        self.tolerance = tolerance
        self.max_iters = max_iters
        self.cg_rtol = cg_rtol
        self.workers = workers
        self.warm_start = warm_start
        self.last_report: Optional[NewtonReport] = None
        self._previous_u_hat: Optional[ScalarField] = None

    def reset(self):
        """Forgets the warm start."""
        self._previous_u_hat = None
        self.last_report = None

    def solve_linear_poisson(self, rho: ScalarField) -> ScalarField:
        """
        Zero-mean Ubar with Laplacian(Ubar) = 1 - rho.

        :raises NonUnitMass: if the grid mean of rho is not 1.
        """
        mean = rho.mean()
        if abs(mean - 1.0) > MASS_TOLERANCE:
            raise NonUnitMass(mean)
        return inverse_laplacian(1.0 - rho, self.workers)

    def solve_nonlinear_poisson(
            self, u_bar: ScalarField, warm_start: Optional[ScalarField] = None
    ) -> ScalarField:
        """
        Unique Uhat with Laplacian(Uhat) = exp(Ubar + Uhat) - 1.

        :param u_bar: the linear part of the potential.
        :param warm_start: optional initial guess. When omitted, the previous
            solution on the same grid is used if warm starts are enabled, and
            otherwise the constant that makes the electron mass exactly 1.
        :raises NoConvergence: if the residual tolerance is not met within
            ``max_iters`` Newton iterations.
        """
        grid = u_bar.grid
        initial = self._initial_guess(u_bar, warm_start)
        report, values = self._newton(grid, u_bar.values, initial)
        self.last_report = report
        u_hat = ScalarField(grid, values)
        if self.warm_start:
            self._previous_u_hat = u_hat
        return u_hat

    def solve_fields(self, rho: ScalarField,
                     mollifier: Optional[Mollifier] = None) -> FieldSolution:
        """
        Solves both parts of the potential and assembles the fields.

        With a mollifier, the ion density is replaced by chi_r * rho and the
        returned fields are E_r = -chi_r * grad U_r; the electron term is
        left unmollified.
        """
        source = mollifier.convolve(rho) if mollifier is not None else rho
        u_bar = self.solve_linear_poisson(source)
        u_hat = self.solve_nonlinear_poisson(u_bar)
        e_bar = -gradient(u_bar, self.workers)
        e_hat = -gradient(u_hat, self.workers)
        if mollifier is not None:
            e_bar = mollifier.convolve_vector(e_bar)
            e_hat = mollifier.convolve_vector(e_hat)

        solution = FieldSolution(
            u_bar=u_bar, u_hat=u_hat, e_bar=e_bar, e_hat=e_hat,
            newton_iters=self.last_report.iterations,
            final_residual=self.last_report.residual,
            objective_history=self.last_report.objective_history,
            mollified=mollifier is not None,
        )
        mass_error = abs(solution.electron_mass() - 1.0)
        if mass_error > 1e-8:
            logger.warning("Electron mass deviates from 1 by %.3e", mass_error)
        return solution

    def _initial_guess(self, u_bar: ScalarField, warm_start: Optional[ScalarField]) -> np.ndarray:
        if warm_start is not None:
            return np.array(warm_start.values)
        previous = self._previous_u_hat
        if self.warm_start and previous is not None and previous.grid == u_bar.grid:
            return np.array(previous.values)
        shift = -np.log(np.mean(np.exp(u_bar.values)))
        return np.full(u_bar.grid.shape, shift)

    def _newton(self, grid: TorusGrid, u_bar: np.ndarray,
                h: np.ndarray) -> Tuple[NewtonReport, np.ndarray]:
        symbols = spectral_symbols(grid)
        cell_volume = grid.cell_volume

        def laplacian(values):
            return backward(grid, symbols.laplacian * forward(grid, values, self.workers),
                            self.workers)

        def objective(values):
            with np.errstate(over="ignore"):
                density = np.exp(u_bar + values)
            dirichlet = -0.5 * values * laplacian(values)
            return float(np.sum(dirichlet + density - values) * cell_volume)

        history = []
        for iteration in range(self.max_iters + 1):
            electron_density = np.exp(u_bar + h)
            residual_field = laplacian(h) - electron_density + 1.0
            residual = float(np.max(np.abs(residual_field)))
            energy = objective(h)
            history.append(energy)
            logger.debug("Newton iteration %d: residual=%.3e objective=%.16e",
                         iteration, residual, energy)
            if residual < self.tolerance:
                return NewtonReport(iteration, residual, tuple(history)), h
            if iteration == self.max_iters:
                break

            direction = self._newton_direction(grid, electron_density, residual_field)
            # gradient of E is -F, so the directional derivative is -<F, direction>
            slope = -float(np.sum(residual_field * direction) * cell_volume)
            step = 1.0
            slack = OBJECTIVE_ROUNDOFF * (abs(energy) + 1.0)
            while objective(h + step * direction) > energy + ARMIJO_SLOPE * step * slope + slack:
                step *= 0.5
                if step < MIN_STEP:
                    raise NoConvergence(iteration, residual)
            h = h + step * direction

        raise NoConvergence(self.max_iters, residual)

    def _newton_direction(self, grid: TorusGrid, electron_density: np.ndarray,
                          residual_field: np.ndarray) -> np.ndarray:
        """Solves (-Laplacian + diag(exp(U))) direction = F by preconditioned CG."""
        symbols = spectral_symbols(grid)
        shape = grid.shape
        size = grid.n_points
        weight = electron_density.ravel()
        shifted_symbol = -symbols.laplacian + float(np.mean(electron_density))

        def matvec(x):
            values = x.reshape(shape)
            negative_laplacian = backward(
                grid, -symbols.laplacian * forward(grid, values, self.workers), self.workers
            )
            return negative_laplacian.ravel() + weight * x

        def precondition(x):
            values = x.reshape(shape)
            return backward(
                grid, forward(grid, values, self.workers) / shifted_symbol, self.workers
            ).ravel()

        operator = LinearOperator((size, size), matvec=matvec, dtype=float)
        preconditioner = LinearOperator((size, size), matvec=precondition, dtype=float)
        direction, info = cg(operator, residual_field.ravel(), rtol=self.cg_rtol, atol=0.0,
                             maxiter=CG_MAX_ITERS, M=preconditioner)
        if info != 0:
            logger.warning("Inner CG solve stopped before reaching rtol=%s (info=%s)",
                           self.cg_rtol, info)
        return direction.reshape(shape)


def solve_linear_poisson(rho: ScalarField) -> ScalarField:
    return FieldSolver().solve_linear_poisson(rho)


def solve_nonlinear_poisson(u_bar: ScalarField,
                            warm_start: Optional[ScalarField] = None) -> ScalarField:
    return FieldSolver(warm_start=False).solve_nonlinear_poisson(u_bar, warm_start)


def solve_fields(rho: ScalarField, mollifier: Optional[Mollifier] = None) -> FieldSolution:
    return FieldSolver(warm_start=False).solve_fields(rho, mollifier)
