"""
Scenario orchestration, run manifests and exit codes.


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

import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from packaging.version import InvalidVersion, Version

from plasma.vpme.cli.config import ScenarioSpec
from plasma.vpme.cli.verification import sweep_mollifier_width, verify_all
from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import (
    ConfigError, GridError, MassMismatch, NoConvergence, NonUnitMass, UnresolvableWidth,
    VerificationFailure, VPMEError
)
from plasma.vpme.diagnostics import UE_LOWER_BOUND, moment_growth_bound, write_diagnostics_csv
from plasma.vpme.domain import (
    ScalarField, TorusGrid, laplacian, read_field_snapshot, write_field_snapshot,
    write_vector_snapshot
)
from plasma.vpme.field_solver import FieldSolver, regularity_report
from plasma.vpme.mollifier import make_mollifier
from plasma.vpme.particles import run, write_ensemble_snapshot
from plasma.vpme.transport import (
    coupled_run, gronwall_fit, inequality_sweep, loeper_inequality_check, random_pairs,
    uhat_stability_check, write_stability_csv
)

logger = logging.getLogger(__name__)

DISTRIBUTION_NAME = "vpme-kinetic"
MANIFEST_NAME = "manifest.json"
FAILURE_NAME = "failure.json"

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3

MANUFACTURED_AMPLITUDE = 0.01
MASS_IDENTITY_TOLERANCE = 1e-8
LINEAR_RESIDUAL_TOLERANCE = 1e-9
MANUFACTURED_TOLERANCE = 1e-7
ZERO_PERTURBATION_D = 1e-20


@dataclass
class ScenarioResult:
    """Named in-scenario assertions, produced artifacts and a JSON summary."""
    checks: Dict[str, bool] = field(default_factory=dict)
    artifacts: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def check(self, name: str, passed: bool):
        passed = bool(passed)
        if not passed:
            logger.warning("Check %s failed", name)
        self.checks[name] = passed

    def write_summary(self, path: Path):
        data = dict(self.summary, checks=self.checks, passed=self.passed)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.artifacts.append(path)


def package_version() -> str:
    try:
        raw = metadata.version(DISTRIBUTION_NAME)
    except metadata.PackageNotFoundError:
        return "0+unknown"
    try:
        return str(Version(raw))
    except InvalidVersion:
        return raw


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_json_atomic(path: Path, data: Dict[str, Any]) -> Path:
    """Writes through a temporary sibling file and renames it into place."""
    temporary = path.with_name(path.name + ".tmp")
    with open(temporary, "w", encoding="utf-8") as output:
        json.dump(data, output, indent=2, sort_keys=True)
        output.write("\n")
        output.flush()
        os.fsync(output.fileno())
    os.replace(temporary, path)
    return path


@dataclass
class RunManifest:  # pylint: disable=too-many-instance-attributes
    """
    Record of one run. The only place timestamps are written, so every other
    artifact of two runs with the same seed is byte-identical.
    """
    scenario: str
    config: Dict[str, Any]
    seed: int
    version: str = field(default_factory=package_version)
    started: str = field(default_factory=_now)
    finished: str = ""
    outputs: List[str] = field(default_factory=list)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def write(self, directory: Path) -> Path:
        self.finished = _now()
        self.outputs = sorted({name for name in self.outputs if (directory / name).exists()})
        return write_json_atomic(directory / MANIFEST_NAME, asdict(self))


def exit_code_for(error: BaseException) -> int:
    """
    Configuration, grid and input-density errors exit with 2, Newton
    non-convergence with 3 and everything else, failed checks included, with 1.
    """
    if isinstance(error, NoConvergence):
        return EXIT_NO_CONVERGENCE
    if isinstance(error, (ConfigError, GridError, UnresolvableWidth, NonUnitMass, MassMismatch)):
        return EXIT_CONFIG
    return EXIT_VERIFICATION


def write_failure(directory: Path, error: BaseException, exit_code: int) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    return write_json_atomic(directory / FAILURE_NAME, {
        "error": type(error).__name__,
        "message": str(error),
        "exit_code": exit_code,
    })


def manufactured_density(grid: TorusGrid) -> Tuple[ScalarField, ScalarField]:
    """
    rho = exp(U*) - Laplacian(U*) for a small trigonometric U* shifted so
    that exp(U*) has unit mean; the exact potential is U*.
    """
    potential = grid.sample(lambda *x: MANUFACTURED_AMPLITUDE * sum(
        np.cos(2 * np.pi * coordinate) for coordinate in x
    ))
    potential = potential - math.log(float(np.mean(np.exp(potential.values))))
    rho = ScalarField(grid, np.exp(potential.values) - laplacian(potential).values)
    return rho, potential


def poisson_verify(spec: ScenarioSpec, out: Path) -> ScenarioResult:
    result = ScenarioResult()
    sim = spec.sim
    expected: Optional[ScalarField] = None
    if spec.density:
        try:
            rho = read_field_snapshot(spec.density)
        except OSError as exc:
            raise ConfigError(f"can not read density snapshot {spec.density}: {exc}") from exc
    else:
        rho, expected = manufactured_density(sim.grid)

    solver = FieldSolver(tolerance=sim.newton_tol, max_iters=sim.newton_max_iters,
                         warm_start=False)
    solution = solver.solve_fields(rho)
    report = regularity_report(rho, solution)

    mass_error = abs(solution.electron_mass() - 1.0)
    linear_residual = (laplacian(solution.u_bar) - (1.0 - rho)).sup_norm()
    result.check("mass_identity", mass_error < MASS_IDENTITY_TOLERANCE)
    result.check("linear_residual", linear_residual < LINEAR_RESIDUAL_TOLERANCE)
    result.check("nonlinear_residual", solution.final_residual <= sim.newton_tol)
    result.summary.update(
        regularity=report.to_dict(), newton_iters=solution.newton_iters,
        final_residual=solution.final_residual, mass_error=mass_error,
        linear_residual=linear_residual,
    )
    if expected is not None:
        potential = solution.potential
        error = ((potential - potential.mean()) - (expected - expected.mean())).sup_norm()
        result.check("manufactured_potential", error < MANUFACTURED_TOLERANCE)
        result.summary["manufactured_error"] = error

    result.artifacts.append(write_field_snapshot(out / "rho.txt", rho))
    result.artifacts.append(write_field_snapshot(out / "u_bar.txt", solution.u_bar))
    result.artifacts.append(write_field_snapshot(out / "u_hat.txt", solution.u_hat))
    result.artifacts.extend(write_vector_snapshot(out, "e_bar", solution.e_bar))
    result.artifacts.extend(write_vector_snapshot(out, "e_hat", solution.e_hat))
    result.write_summary(out / "poisson.json")
    return result


def simulate(spec: ScenarioSpec, out: Path) -> ScenarioResult:
    result = ScenarioResult()
    outcome = run(spec.sim, spec.initial)
    records = outcome.records
    initial = records[0]

    drift = max(abs(current.total - initial.total) for current in records) \
        / max(abs(initial.total), 1e-300)
    m0 = float(spec.initial.m0)
    if spec.energy_tolerance is not None:
        result.check("energy_drift", drift <= spec.energy_tolerance)
    result.check("ue_lower_bound", all(
        current.ue_term >= UE_LOWER_BOUND - 1e-12 for current in records
    ))
    result.check("moment_growth", all(
        current.moments[m0] <= moment_growth_bound(initial.moments[m0], current.time, m0)
        for current in records
    ))
    result.summary.update(
        relative_energy_drift=drift, records=len(records), final_time=records[-1].time,
        initial_energy=initial.total, final_energy=records[-1].total,
    )

    result.artifacts.append(write_diagnostics_csv(out / "diagnostics.csv", records))
    result.artifacts.append(write_ensemble_snapshot(out / "final_ensemble.txt", outcome.ensemble))
    result.write_summary(out / "simulate.json")
    return result


def stability(spec: ScenarioSpec, out: Path) -> ScenarioResult:
    result = ScenarioResult()
    grid = spec.sim.grid
    coupled = coupled_run(spec.sim, spec.initial, spec.perturbation)
    fit = gronwall_fit(coupled.records, grid.dim)

    result.check("coupling_bounds_w2", all(
        current.coupling_bound_holds for current in coupled.records
    ))
    result.check("gronwall_fit_finite", math.isfinite(fit.slope))
    if spec.perturbation.is_zero:
        result.check("zero_perturbation", coupled.max_d < ZERO_PERTURBATION_D)

    rng = np.random.default_rng(spec.seed)
    sweeps = []
    if grid.dim == 1:
        mollifier = make_mollifier(grid, sweep_mollifier_width(grid, spec.sim.mollifier_r))
        sweeps.append(inequality_sweep("loeper_inequality", loeper_inequality_check,
                                       random_pairs(grid, rng, spec.trials, mollifier)))
    sweeps.append(inequality_sweep("uhat_stability", uhat_stability_check,
                                   random_pairs(grid, rng, spec.trials)))
    for sweep in sweeps:
        result.check(sweep.name, sweep.passed)

    result.summary.update(
        gronwall=fit.to_dict(), max_d=coupled.max_d, records=len(coupled.records),
        sweeps=[sweep.to_dict() for sweep in sweeps],
    )
    result.artifacts.append(write_stability_csv(out / "stability.csv", coupled.records))
    result.write_summary(out / "stability.json")
    return result


def verify(spec: ScenarioSpec, out: Path) -> ScenarioResult:
    report = verify_all(spec)
    result = ScenarioResult(checks=report.verdicts)
    result.artifacts.extend(report.write(out))
    return result


SCENARIOS: Dict[str, Callable[[ScenarioSpec, Path], ScenarioResult]] = {
    "poisson-verify": poisson_verify,
    "simulate": simulate,
    "stability": stability,
    "verify-all": verify,
}


def run_scenario(name: str, spec: ScenarioSpec, out: Union[str, Path]) -> int:
    """
    Runs one scenario, writes its artifacts and the manifest into ``out``.

    :returns: 0 if every in-scenario assertion passed, 1 on an assertion
        failure or an unexpected error, 2 on a configuration or input error
        and 3 if a nonlinear Poisson solve did not converge. Nonzero exits
        also write ``failure.json``.
    """
    if name not in SCENARIOS:
        raise ValueError(f"Unknown scenario {name!r}, expected one of {tuple(SCENARIOS)}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(scenario=name, config=spec.as_mapping(), seed=spec.seed)
    logger.info("Starting scenario %s (seed=%d, version %s)", name, spec.seed, manifest.version)

    try:
        result = SCENARIOS[name](spec, out)
        manifest.outputs = [path.name for path in result.artifacts]
        manifest.verdicts = dict(result.checks)
        if not result.passed:
            failing = sorted(check for check, passed in result.checks.items() if not passed)
            raise VerificationFailure(f"Failed checks: {', '.join(failing)}")
        exit_code = EXIT_OK
    except VPMEError as exc:
        exit_code = exit_code_for(exc)
        logger.error("Scenario %s failed: %s", name, exc)
        write_failure(out, exc, exit_code)
        manifest.outputs.append(FAILURE_NAME)
    except Exception as exc:  # pylint: disable=broad-except
        exit_code = EXIT_VERIFICATION
        logger.exception("Scenario %s crashed", name)
        write_failure(out, exc, exit_code)
        manifest.outputs.append(FAILURE_NAME)

    manifest.exit_code = exit_code
    manifest.write(out)
    logger.info("Scenario %s finished with exit code %d", name, exit_code)
    return exit_code
