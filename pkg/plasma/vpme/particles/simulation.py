"""
Kick-drift-kick particle pusher and the simulation time loop.


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
from typing import List, Optional

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.diagnostics import DiagnosticsRecord, record
from plasma.vpme.domain import ScalarField, wrap_positions
from plasma.vpme.field_solver import FieldSolution, FieldSolver
from plasma.vpme.mollifier import Mollifier, make_mollifier
from plasma.vpme.particles.config import SimConfig
from plasma.vpme.particles.deposition import deposit, interpolate_field
from plasma.vpme.particles.ensemble import ParticleEnsemble
from plasma.vpme.particles.initial_data import InitialData, sample_initial

logger = logging.getLogger(__name__)


@dataclass
class ForceEvaluation:
    """Self-consistent fields of an ensemble and the resulting accelerations."""
    rho: ScalarField
    solution: FieldSolution
    acceleration: np.ndarray


@dataclass
class RunResult:
    records: List[DiagnosticsRecord] = field(default_factory=list)
    ensemble: Optional[ParticleEnsemble] = None


class Simulation:
    """
    Owns the evolving ensemble together with its field solver.

    The forces at the current positions are cached between steps, so each
    kick-drift-kick step costs one deposition and one field solve.
    """

    def __init__(
            self, cfg: SimConfig, ensemble: ParticleEnsemble,
            field_solver: Optional[FieldSolver] = None,
            mollifier: Optional[Mollifier] = None,
            workers: Optional[int] = None
    ):
        self.cfg = cfg
        self.ensemble = ensemble.wrapped()
        self.workers = workers
        self.field_solver = field_solver or FieldSolver(
            tolerance=cfg.newton_tol, max_iters=cfg.newton_max_iters, workers=workers
        )
        if mollifier is None and cfg.mollifier_r is not None:
            mollifier = make_mollifier(cfg.grid, cfg.mollifier_r)
        self.mollifier = mollifier
        self.steps_taken = 0
        self._force: Optional[ForceEvaluation] = None

    @property
    def time(self) -> float:
        return self.steps_taken * self.cfg.dt

    @property
    def force(self) -> ForceEvaluation:
        if self._force is None:
            self._force = self.evaluate_forces(self.ensemble)
        return self._force

    def evaluate_forces(self, ensemble: ParticleEnsemble) -> ForceEvaluation:
        rho = deposit(ensemble, self.cfg.grid, self.workers)
        solution = self.field_solver.solve_fields(rho, self.mollifier)
        acceleration = interpolate_field(solution.e_total, ensemble.positions)
        return ForceEvaluation(rho, solution, acceleration)

    def advance(self) -> ParticleEnsemble:
        """One kick-drift-kick step of length ``cfg.dt``."""
        dt = self.cfg.dt
        half_kick = self.ensemble.velocities + 0.5 * dt * self.force.acceleration
        positions = wrap_positions(self.ensemble.positions + dt * half_kick)
        drifted = self.ensemble.with_state(positions, half_kick)

        force = self.evaluate_forces(drifted)
        velocities = half_kick + 0.5 * dt * force.acceleration
        self.ensemble = drifted.with_state(positions, velocities)
        self._force = force
        self.steps_taken += 1
        return self.ensemble

    def diagnostics(self, m0: float) -> DiagnosticsRecord:
        force = self.force
        rho = force.rho
        if self.cfg.mollify_diagnostics and self.mollifier is not None:
            rho = self.mollifier.convolve(rho)
        return record(self.time, self.ensemble, rho, force.solution, m0)

    def run(self, m0: float) -> RunResult:
        """Advances to ``t_final``, recording diagnostics every ``output_every`` steps."""
        result = RunResult()
        result.records.append(self.diagnostics(m0))
        for step_index in range(1, self.cfg.n_steps + 1):
            self.advance()
            if step_index % self.cfg.output_every == 0:
                current = self.diagnostics(m0)
                logger.info("t=%.6g total energy=%.16e newton_iters=%d", current.time,
                            current.total, self.force.solution.newton_iters)
                result.records.append(current)
        result.ensemble = self.ensemble
        return result


def step(ens: ParticleEnsemble, cfg: SimConfig, field_solver: FieldSolver,
         mollifier: Optional[Mollifier] = None) -> ParticleEnsemble:
    """One leapfrog step of ``ens`` under its self-consistent field."""
    return Simulation(cfg, ens, field_solver, mollifier).advance()


def run(cfg: SimConfig, data: InitialData) -> RunResult:
    """
    Samples the initial data, checks the CFL sanity bound and runs to ``t_final``.

    :raises CFLViolation: before any field solve if dt is too large.
    """
    ensemble = sample_initial(cfg, data)
    cfg.validate_cfl(ensemble.max_speed())
    return Simulation(cfg, ensemble).run(data.m0)
