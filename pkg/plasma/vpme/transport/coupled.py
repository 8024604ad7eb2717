"""
Two trajectories evolved from a shared initial coupling.

Both ensembles start from one sample with the identity pairing, the second
one displaced by a :class:`Perturbation`, and each then moves under its own
self-consistent field. The coupling cost D(t) of the evolved pairing bounds
W2^2 between the two solutions from above.


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

import asyncio
import csv
import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.diagnostics.energy import format_value
from plasma.vpme.domain import VectorField, wrap_positions
from plasma.vpme.particles import (
    InitialData, ParticleEnsemble, SimConfig, Simulation, interpolate_field, sample_initial
)
from plasma.vpme.transport.wasserstein import (
    EXACT_LIMIT, coupling_cost, w2_ensembles_subsampled
)

logger = logging.getLogger(__name__)

STABILITY_COLUMNS = ("t", "D", "W2_est", "I1", "I2", "I3", "I4")
COUPLING_SLACK = 1e-12


@dataclass(frozen=True)
class Perturbation:
    """Uniform shift of the second trajectory's initial positions and velocities."""
    displacement: float = 1e-4
    velocity: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.displacement == 0.0 and self.velocity == 0.0

    def apply(self, ensemble: ParticleEnsemble) -> ParticleEnsemble:
        """Shifts the first coordinate of every position and velocity."""
        if self.is_zero:
            return ensemble.copy()
        positions = ensemble.positions.copy()
        velocities = ensemble.velocities.copy()
        positions[:, 0] += self.displacement
        velocities[:, 0] += self.velocity
        return ensemble.with_state(wrap_positions(positions), velocities)


@dataclass
class CoupledRunState:
    """Two identically indexed ensembles and their coupling cost D."""
    first: ParticleEnsemble
    second: ParticleEnsemble
    d_value: float = field(init=False)

    def __post_init__(self):
        if self.first.n_particles != self.second.n_particles:
            raise ValueError("Coupled ensembles must be identically indexed")
        self.d_value = coupling_cost(self.first, self.second)


@dataclass(frozen=True)
class CoupledRecord:  # pylint: disable=too-many-instance-attributes
    """
    One output time of a coupled run.

    ``w2_estimate`` is W2 (not squared) of the paired subsample, ``band`` the
    subsampling band on D, and I1..I4 the field discrepancies along the
    coupling: I1 = sum w |E1(X1) - E1(X2)|^2 and I2 = sum w |E1(X2) - E2(X2)|^2
    for the linear part, I3 and I4 likewise for the nonlinear part.
    """
    t: float
    d_value: float
    w2_estimate: float
    band: float
    i1: float
    i2: float
    i3: float
    i4: float

    @property
    def coupling_bound_holds(self) -> bool:
        """D >= W2^2 - band, up to roundoff."""
        slack = COUPLING_SLACK * max(self.d_value, self.w2_estimate ** 2)
        return self.d_value >= self.w2_estimate ** 2 - self.band - slack

    def as_row(self) -> Dict[str, float]:
        return {
            "t": self.t, "D": self.d_value, "W2_est": self.w2_estimate,
            "I1": self.i1, "I2": self.i2, "I3": self.i3, "I4": self.i4,
        }


@dataclass
class CoupledRun:
    records: List[CoupledRecord] = field(default_factory=list)
    first: Optional[ParticleEnsemble] = None
    second: Optional[ParticleEnsemble] = None

    @property
    def max_d(self) -> float:
        return max(current.d_value for current in self.records)

    @property
    def final_state(self) -> CoupledRunState:
        return CoupledRunState(self.first, self.second)


def _field_gap(weights: np.ndarray, field_a: VectorField, x_a: np.ndarray,
               field_b: VectorField, x_b: np.ndarray) -> float:
    difference = interpolate_field(field_a, x_a) - interpolate_field(field_b, x_b)
    return float(np.sum(weights * np.sum(difference ** 2, axis=1)))


def _measure(first: Simulation, second: Simulation, rng: np.random.Generator,
             sample_size: int) -> CoupledRecord:
    x1, x2 = first.ensemble.positions, second.ensemble.positions
    weights = first.ensemble.weights
    sol1, sol2 = first.force.solution, second.force.solution
    estimate = w2_ensembles_subsampled(first.ensemble, second.ensemble, rng, sample_size)
    return CoupledRecord(
        t=first.time,
        d_value=estimate.full_cost,
        w2_estimate=estimate.w2,
        band=estimate.band,
        i1=_field_gap(weights, sol1.e_bar, x1, sol1.e_bar, x2),
        i2=_field_gap(weights, sol1.e_bar, x2, sol2.e_bar, x2),
        i3=_field_gap(weights, sol1.e_hat, x1, sol1.e_hat, x2),
        i4=_field_gap(weights, sol1.e_hat, x2, sol2.e_hat, x2),
    )


def _advance(simulation: Simulation, steps: int):
    for _ in range(steps):
        simulation.advance()


async def coupled_run_async(cfg: SimConfig, data: InitialData, perturbation: Perturbation,
                            sample_size: int = EXACT_LIMIT,
                            executor: Optional[Executor] = None) -> CoupledRun:
    """
    Evolves both trajectories concurrently on ``executor``, synchronising
    at every output time to record D(t), the W2 estimate and I1..I4.

    :raises CFLViolation: before any field solve if dt is too large.
    """
    base = sample_initial(cfg, data)
    perturbed = perturbation.apply(base)
    cfg.validate_cfl(max(base.max_speed(), perturbed.max_speed()))

    first = Simulation(cfg, base)
    second = Simulation(cfg, perturbed)
    rng = np.random.default_rng(cfg.seed)
    loop = asyncio.get_running_loop()

    own_executor = executor is None
    if own_executor:
        executor = ThreadPoolExecutor(max_workers=2, thread_name_prefix="vpme-coupled")

    result = CoupledRun()
    try:
        result.records.append(_measure(first, second, rng, sample_size))
        remaining = cfg.n_steps
        while remaining > 0:
            block = min(cfg.output_every, remaining)
            await asyncio.gather(
                loop.run_in_executor(executor, _advance, first, block),
                loop.run_in_executor(executor, _advance, second, block),
            )
            remaining -= block
            current = _measure(first, second, rng, sample_size)
            logger.info("t=%.6g D=%.6e W2_est=%.6e", current.t, current.d_value,
                        current.w2_estimate)
            result.records.append(current)
    finally:
        if own_executor:
            executor.shutdown(wait=True)

    result.first, result.second = first.ensemble, second.ensemble
    return result


def coupled_run(cfg: SimConfig, data: InitialData, perturbation: Perturbation,
                sample_size: int = EXACT_LIMIT) -> CoupledRun:
    return asyncio.run(coupled_run_async(cfg, data, perturbation, sample_size))


@dataclass(frozen=True)
class GronwallFit:
    """
    Least-squares line through log log(d e / (4 D)) against t.

    The stability bound D(t) <= (d e / 4) exp(log(4 D(0) / (d e)) exp(-C t))
    makes this quantity decrease at most linearly, with rate C = -slope.
    """
    slope: float
    intercept: float
    n_points: int

    @property
    def rate(self) -> float:
        return max(0.0, -self.slope)

    def to_dict(self) -> Dict[str, float]:
        return {"slope": self.slope, "intercept": self.intercept,
                "rate": self.rate, "n_points": self.n_points}


def gronwall_fit(records: Sequence[CoupledRecord], dim: int) -> GronwallFit:
    """Fits the records with 0 < D < d/4; fewer than two such points give a flat fit."""
    ceiling = dim * math.e / 4.0
    usable = [current for current in records if 0.0 < current.d_value < dim / 4.0]
    if len(usable) < 2:
        return GronwallFit(slope=0.0, intercept=0.0, n_points=len(usable))
    times = np.array([current.t for current in usable])
    values = np.log(np.log(ceiling / np.array([current.d_value for current in usable])))
    slope, intercept = np.polyfit(times, values, 1)
    return GronwallFit(slope=float(slope), intercept=float(intercept), n_points=len(usable))


def write_stability_csv(path: Union[str, Path], records: Iterable[CoupledRecord]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(STABILITY_COLUMNS)
        for current in records:
            row = current.as_row()
            writer.writerow([format_value(row[column]) for column in STABILITY_COLUMNS])
    return path
