"""
Desk-scale verification suite run by the ``verify`` subcommand.

Each property is a method of :class:`VerificationSuite` returning a
:class:`PropertyResult`. Every random draw comes from a generator seeded with
the run seed and the property's position in :data:`PROPERTIES`, so two runs
with the same seed produce identical results.


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
import dataclasses
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.diagnostics import (
    UE_LOWER_BOUND, PhaseSpaceDensity, energy_density_bound, interpolation_check,
    log_lipschitz_probe, moment_growth_bound
)
from plasma.vpme.diagnostics.energy import format_value
from plasma.vpme.domain import ScalarField, TorusGrid, coulomb_kernel, inverse_laplacian, laplacian
from plasma.vpme.field_solver import FieldSolver, regularity_report, solve_fields
from plasma.vpme.mollifier import make_mollifier, regularised_kernel_bound
from plasma.vpme.mollifier.mollifier import MAX_WIDTH, MIN_WIDTH_IN_CELLS
from plasma.vpme.particles import (
    InitialData, ParticleEnsemble, RunResult, SimConfig, Simulation, run, sample_initial
)
from plasma.vpme.transport import (
    coupled_run, gronwall_fit, inequality_sweep, loeper_inequality_check, random_density,
    random_pairs, uhat_stability_check, ustab_structure, w2_densities_1d, w2_ensembles_exact
)
from plasma.vpme.transport.wasserstein import optimal_coupling, squared_cost_matrix

logger = logging.getLogger(__name__)

VERIFY_COLUMNS = ("name", "passed", "value")
KERNEL_RADII = (1 / 8, 1 / 16, 1 / 32, 1 / 64)
DEFAULT_ENERGY_TOLERANCE = 1e-2
W2_INSTANCES = 50
W2_TRIPLES = 200
INTERPOLATION_SAMPLES = 200
INTERPOLATION_EXPONENTS = ((2.0, 0.0), (4.0, 1.0), (4.0, 2.0))
# In d = 1, Ebar' = rho - 1 and |rho - 1| <= sup rho, so the ratio never exceeds 1.
LOG_LIPSCHITZ_CONSTANT = 1.0
LOG_LIPSCHITZ_GRIDS = (128, 512)
LOG_LIPSCHITZ_PAIRS = 4000
REFINEMENT_TOLERANCE = 0.1
NARROW_BUMP_WIDTH = 0.03
STATIONARY_BAND = 3.0
MOMENT_RUN = SimConfig(grid=TorusGrid(2, 32), n_particles=20_000, dt=2.5e-3, t_final=0.25,
                       output_every=20)
MOMENT_DATA = InitialData(kind="perturbed_maxwellian", temperature=0.25, m0=4.0)
COUPLING_SAMPLE_SIZE = 1024
STABLE_D = 1e-2
STRUCTURE_FAMILIES = 5
REGULARITY_CONSTANT = 1.0
REGULARITY_DENSITIES = 5

PROPERTIES = (
    "spectral_round_trip",
    "kernel_antisymmetry",
    "nonlinear_manufactured",
    "mass_identity",
    "loeper_inequality",
    "uhat_stability",
    "kernel_bound",
    "w2_exactness",
    "w2_metric",
    "circle_translated_bump",
    "moment_interpolation",
    "energy_conservation",
    "log_lipschitz_calibration",
    "density_energy_bound",
    "maxwellian_stationarity",
    "moment_propagation_2d",
    "gronwall_coupling",
    "ustab_structure",
    "regularity_bound",
)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    value: float
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "details": self.details}


@dataclass
class VerificationReport:
    results: List[PropertyResult] = field(default_factory=list)
    kernel_bound: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def verdicts(self) -> Dict[str, bool]:
        return {result.name: result.passed for result in self.results}

    def write(self, directory: Path) -> List[Path]:
        json_path = directory / "verify.json"
        json_path.write_text(json.dumps({
            "passed": self.passed,
            "properties": [result.to_dict() for result in self.results],
        }, indent=2, sort_keys=True) + "\n", encoding="utf-8")

        csv_path = directory / "verify.csv"
        with open(csv_path, "w", newline="", encoding="utf-8") as output:
            writer = csv.writer(output, lineterminator="\n")
            writer.writerow(VERIFY_COLUMNS)
            for result in self.results:
                writer.writerow([result.name, str(result.passed).lower(),
                                 format_value(result.value)])

        paths = [json_path, csv_path]
        if self.kernel_bound is not None:
            kernel_path = directory / "kernel_bound.json"
            kernel_path.write_text(json.dumps(self.kernel_bound, indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")
            paths.append(kernel_path)
        return paths


def sweep_mollifier_width(grid: TorusGrid, configured: Optional[float] = None) -> float:
    if configured is not None:
        return configured
    return min(MAX_WIDTH, max(1.0 / 16.0, MIN_WIDTH_IN_CELLS * grid.spacing))


def _random_ensemble(rng: np.random.Generator, n_particles: int, dim: int) -> ParticleEnsemble:
    return ParticleEnsemble.equal_weights(
        rng.uniform(-0.5, 0.5, size=(n_particles, dim)),
        rng.normal(size=(n_particles, dim)),
    )


def _gaussian_bump(grid: TorusGrid, width: float) -> ScalarField:
    values = np.exp(-0.5 * (grid.distance_to_origin / width) ** 2)
    return ScalarField(grid, values / np.mean(values))


def brute_force_w2_squared(a: ParticleEnsemble, b: ParticleEnsemble) -> float:
    """Minimum over every permutation, summed like :func:`optimal_coupling`."""
    cost = squared_cost_matrix(a, b, workers=1)
    n = a.n_particles
    permutations = np.array(list(itertools.permutations(range(n))))
    totals = np.sum(np.sort(cost[np.arange(n), permutations], axis=1), axis=1) / n
    return float(np.min(totals))


class VerificationSuite:
    """Runs every property of :data:`PROPERTIES` for one scenario spec."""

    def __init__(self, spec):
        self.spec = spec
        self.kernel_bound: Optional[Dict[str, Any]] = None

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng([self.spec.seed, PROPERTIES.index(name)])

    def run(self) -> VerificationReport:
        report = VerificationReport()
        for name in PROPERTIES:
            check: Callable[[], PropertyResult] = getattr(self, f"check_{name}")
            result = check()
            logger.info("%s: %s (value=%.6g)", name, "pass" if result.passed else "FAIL",
                        result.value)
            report.results.append(result)
        report.kernel_bound = self.kernel_bound
        return report

    def check_spectral_round_trip(self) -> PropertyResult:
        rng = self.rng("spectral_round_trip")
        grid = TorusGrid(1, 128)
        x = grid.axis
        values = sum(
            rng.normal() * np.cos(2 * np.pi * k * x) + rng.normal() * np.sin(2 * np.pi * k * x)
            for k in range(1, 9)
        )
        f = ScalarField(grid, values - np.mean(values), zero_mean=True)
        error = (laplacian(inverse_laplacian(f)) - f).sup_norm()
        return PropertyResult("spectral_round_trip", error < 1e-9, error)

    def check_kernel_antisymmetry(self) -> PropertyResult:
        kernel = coulomb_kernel(TorusGrid(2, 64))
        mask = kernel.regular_mask
        gap = float(np.max((kernel.values + kernel.mirrored()).magnitude()[mask]))
        mean = max(abs(float(np.mean(component))) for component in kernel.values.components)
        return PropertyResult("kernel_antisymmetry", gap < 1e-10 and mean < 1e-10, gap,
                              {"component_mean": mean})

    def check_nonlinear_manufactured(self) -> PropertyResult:
        grid = TorusGrid(1, 128)
        expected = grid.sample(lambda x: 0.01 * np.cos(2 * np.pi * x))
        u_bar = ScalarField(grid, np.log(1.0 + laplacian(expected).values) - expected.values)
        solver = FieldSolver(warm_start=False)
        u_hat = solver.solve_nonlinear_poisson(u_bar)
        error = (u_hat - expected).sup_norm()
        history = solver.last_report.objective_history
        descending = all(later <= earlier + 1e-14 * (abs(earlier) + 1.0)
                         for earlier, later in zip(history, history[1:]))
        iterations = solver.last_report.iterations
        return PropertyResult(
            "nonlinear_manufactured", error < 1e-8 and iterations <= 10 and descending, error,
            {"newton_iters": iterations, "objective_descending": descending},
        )

    def check_mass_identity(self) -> PropertyResult:
        rng = self.rng("mass_identity")
        worst = 0.0
        for grid in (TorusGrid(1, 128), TorusGrid(2, 64)):
            solver = FieldSolver(warm_start=False)
            for _ in range(self.spec.trials):
                solution = solver.solve_fields(random_density(grid, rng))
                worst = max(worst, abs(solution.electron_mass() - 1.0))
        return PropertyResult("mass_identity", worst < 1e-8, worst)

    def check_loeper_inequality(self) -> PropertyResult:
        rng = self.rng("loeper_inequality")
        grid = TorusGrid(1, 128)
        mollifier = make_mollifier(grid, sweep_mollifier_width(grid))
        sweep = inequality_sweep("loeper_inequality", loeper_inequality_check,
                                 random_pairs(grid, rng, self.spec.trials, mollifier))
        return PropertyResult("loeper_inequality", sweep.passed, sweep.worst_relative_margin,
                              sweep.to_dict())

    def check_uhat_stability(self) -> PropertyResult:
        rng = self.rng("uhat_stability")
        sweeps = [
            inequality_sweep(f"uhat_stability_d{grid.dim}", uhat_stability_check,
                             random_pairs(grid, rng, self.spec.trials))
            for grid in (TorusGrid(1, 128), TorusGrid(2, 64))
        ]
        worst = min(sweep.worst_relative_margin for sweep in sweeps)
        return PropertyResult("uhat_stability", all(sweep.passed for sweep in sweeps), worst,
                              {sweep.name: sweep.to_dict() for sweep in sweeps})

    def check_kernel_bound(self) -> PropertyResult:
        report = regularised_kernel_bound(TorusGrid(2, 128), KERNEL_RADII)
        self.kernel_bound = report.to_dict()
        ratio = report.worst_to_first_ratio()
        finite = all(math.isfinite(bound) for bound in report.bounds)
        return PropertyResult("kernel_bound", finite and ratio <= 2.0, ratio)

    def check_w2_exactness(self) -> PropertyResult:
        rng = self.rng("w2_exactness")
        mismatches = 0
        for _ in range(W2_INSTANCES):
            a = _random_ensemble(rng, 6, 1)
            b = _random_ensemble(rng, 6, 1)
            if optimal_coupling(a, b).cost != brute_force_w2_squared(a, b):
                mismatches += 1
        return PropertyResult("w2_exactness", mismatches == 0, float(mismatches))

    def check_w2_metric(self) -> PropertyResult:
        rng = self.rng("w2_metric")
        worst_excess = -math.inf
        symmetric = True
        identity = 0.0
        for _ in range(W2_TRIPLES):
            a, b, c = (_random_ensemble(rng, 8, 2) for _ in range(3))
            ab, bc = w2_ensembles_exact(a, b), w2_ensembles_exact(b, c)
            ac = w2_ensembles_exact(a, c)
            worst_excess = max(worst_excess, ac - ab - bc)
            symmetric = symmetric and w2_ensembles_exact(b, a) == ab
            identity = max(identity, w2_ensembles_exact(a, a))
        passed = worst_excess <= 1e-9 and symmetric and identity == 0.0
        return PropertyResult("w2_metric", passed, worst_excess,
                              {"symmetric": symmetric, "identity": identity})

    def check_circle_translated_bump(self) -> PropertyResult:
        grid = TorusGrid(1, 256)
        shift_cells = grid.cells_per_dim // 4
        first = _gaussian_bump(grid, 0.01)
        second = ScalarField(grid, np.roll(first.values, shift_cells))
        distance = w2_densities_1d(first, second)
        return PropertyResult("circle_translated_bump", abs(distance - 0.25) < 1e-3, distance)

    def check_moment_interpolation(self) -> PropertyResult:
        rng = self.rng("moment_interpolation")
        violations = 0
        worst_ratio = 0.0
        grids = (TorusGrid(1, 8), TorusGrid(2, 8))
        for index in range(INTERPOLATION_SAMPLES):
            grid = grids[index % 2]
            m, k = INTERPOLATION_EXPONENTS[index % len(INTERPOLATION_EXPONENTS)]
            n_v = 16 if grid.dim == 1 else 8
            g = PhaseSpaceDensity(grid, 4.0, rng.random(grid.shape + (n_v,) * grid.dim) ** 3)
            check = interpolation_check(g, m, k)
            violations += 0 if check.passed else 1
            worst_ratio = max(worst_ratio, check.ratio)
        return PropertyResult("moment_interpolation", violations == 0, worst_ratio,
                              {"violations": violations})

    @cached_property
    def reference_run(self) -> RunResult:
        """The configured run, shared by the energy and density checks."""
        return run(self.spec.sim, self.spec.initial)

    def check_energy_conservation(self) -> PropertyResult:
        """
        Relative energy drift over the configured horizon, ``t_final``, against
        ``energy_tolerance``.
        """
        records = self.reference_run.records
        initial = records[0]
        scale = max(abs(initial.total), 1e-300)
        drift = max(abs(current.total - initial.total) for current in records) / scale
        tolerance = self.spec.energy_tolerance or DEFAULT_ENERGY_TOLERANCE
        m0 = float(self.spec.initial.m0)
        moments_bounded = all(
            current.moments[m0] <= moment_growth_bound(initial.moments[m0], current.time, m0)
            for current in records
        )
        ue_bounded = all(current.ue_term >= UE_LOWER_BOUND - 1e-12 for current in records)
        return PropertyResult(
            "energy_conservation", drift <= tolerance and moments_bounded and ue_bounded, drift,
            {"tolerance": tolerance, "t_final": self.spec.sim.t_final,
             "moments_bounded": moments_bounded, "ue_bounded": ue_bounded,
             "records": len(records)},
        )

    def check_log_lipschitz_calibration(self) -> PropertyResult:
        seed = int(self.rng("log_lipschitz_calibration").integers(2 ** 31))
        smooth, narrow = [], []
        for cells in LOG_LIPSCHITZ_GRIDS:
            grid = TorusGrid(1, cells)
            for ratios, rho in (
                (smooth, grid.sample(lambda x: 1.0 + 0.5 * np.cos(2 * np.pi * x))),
                (narrow, _gaussian_bump(grid, NARROW_BUMP_WIDTH)),
            ):
                e_bar = solve_fields(rho).e_bar
                ratios.append(log_lipschitz_probe(e_bar, rho.sup_norm(), LOG_LIPSCHITZ_PAIRS, seed))
        worst = max(smooth + narrow)
        stable = abs(smooth[-1] - smooth[0]) <= REFINEMENT_TOLERANCE * smooth[0]
        passed = worst <= LOG_LIPSCHITZ_CONSTANT + 1e-6 and stable and min(smooth) > 0.0
        return PropertyResult("log_lipschitz_calibration", passed, worst, {
            "constant": LOG_LIPSCHITZ_CONSTANT, "grids": list(LOG_LIPSCHITZ_GRIDS),
            "smooth": smooth, "narrow_bump": narrow,
        })

    def check_density_energy_bound(self) -> PropertyResult:
        sim = self.spec.sim
        records = self.reference_run.records
        ensemble = sample_initial(sim, self.spec.initial)
        v_max = 1.01 * float(np.max(np.abs(ensemble.velocities)))
        f_sup = float(np.max(PhaseSpaceDensity.from_ensemble(ensemble, sim.grid, v_max, 32).values))
        bound = energy_density_bound(records[0].total, sim.grid.dim, f_sup)
        worst = max(current.rho_lp for current in records)
        return PropertyResult("density_energy_bound", worst <= bound, worst / bound,
                              {"bound": bound, "f_sup": f_sup, "worst_rho_lp": worst})

    def check_maxwellian_stationarity(self) -> PropertyResult:
        """||rho(t) - 1||_sup of a uniform Maxwellian stays within a band of its t = 0 noise."""
        sim = self.spec.sim
        data = dataclasses.replace(self.spec.initial, kind="uniform_maxwellian")
        ensemble = sample_initial(sim, data)
        sim.validate_cfl(ensemble.max_speed())
        simulation = Simulation(sim, ensemble)
        initial = (simulation.force.rho - 1.0).sup_norm()
        worst = initial
        for _ in range(sim.n_steps):
            simulation.advance()
            worst = max(worst, (simulation.force.rho - 1.0).sup_norm())
        ratio = worst / initial if initial > 0.0 else 0.0
        return PropertyResult("maxwellian_stationarity", ratio <= STATIONARY_BAND, ratio,
                              {"initial_deviation": initial, "worst_deviation": worst})

    def check_moment_propagation_2d(self) -> PropertyResult:
        records = run(dataclasses.replace(MOMENT_RUN, seed=self.spec.seed), MOMENT_DATA).records
        m0 = MOMENT_DATA.m0
        initial = records[0].moments[m0]
        ratios = [current.moments[m0] / moment_growth_bound(initial, current.time, m0)
                  for current in records]
        return PropertyResult("moment_propagation_2d", max(ratios) <= 1.0, max(ratios),
                              {"records": len(records), "final_moment": records[-1].moments[m0]})

    def check_gronwall_coupling(self) -> PropertyResult:
        coupled = coupled_run(self.spec.sim, self.spec.initial, self.spec.perturbation,
                              COUPLING_SAMPLE_SIZE)
        fit = gronwall_fit(coupled.records, self.spec.sim.grid.dim)
        coupling = all(current.coupling_bound_holds for current in coupled.records)
        passed = coupling and coupled.max_d < STABLE_D and math.isfinite(fit.slope)
        return PropertyResult("gronwall_coupling", passed, coupled.max_d,
                              {"coupling_bounds_w2": coupling, "gronwall": fit.to_dict()})

    def check_ustab_structure(self) -> PropertyResult:
        rng = self.rng("ustab_structure")
        grid = TorusGrid(1, 64)
        mollifier = make_mollifier(grid, 1 / 8)
        failures = 0
        largest = 0.0
        for _ in range(STRUCTURE_FAMILIES):
            report = ustab_structure(random_density(grid, rng, mollifier),
                                     random_density(grid, rng, mollifier))
            failures += 0 if report.finite and report.monotone else 1
            largest = max(largest, report.gaps[0])
        return PropertyResult("ustab_structure", failures == 0, largest, {"failures": failures})

    def check_regularity_bound(self) -> PropertyResult:
        rng = self.rng("regularity_bound")
        densities = [_gaussian_bump(TorusGrid(1, 128), NARROW_BUMP_WIDTH)]
        for grid in (TorusGrid(1, 128), TorusGrid(2, 64)):
            mollifier = make_mollifier(grid, 1 / 8)
            densities.extend(random_density(grid, rng, mollifier)
                             for _ in range(REGULARITY_DENSITIES))
        holds = True
        worst = 0.0
        for rho in densities:
            report = regularity_report(rho, FieldSolver(warm_start=False).solve_fields(rho))
            holds = holds and report.bound_holds(REGULARITY_CONSTANT)
            scale = math.exp(REGULARITY_CONSTANT * (1.0 + report.density_lp_norm))
            worst = max(worst, report.uhat_sup / scale)
        return PropertyResult("regularity_bound", holds, worst,
                              {"constant": REGULARITY_CONSTANT, "densities": len(densities)})


def verify_all(spec) -> VerificationReport:
    return VerificationSuite(spec).run()
