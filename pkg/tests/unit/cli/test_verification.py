"""
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
import csv
import json
import math
from unittest import mock

import numpy as np
import pytest

from plasma.vpme.cli import PROPERTIES, VerificationSuite, config_from_mapping, reference_spec
from plasma.vpme.cli.verification import (
    LOG_LIPSCHITZ_CONSTANT, PropertyResult, VerificationReport, brute_force_w2_squared, run,
    sweep_mollifier_width
)
from plasma.vpme.domain import TorusGrid
from plasma.vpme.particles import ParticleEnsemble


@pytest.fixture
def suite():
    spec = config_from_mapping({
        "grid": 32,
        "n": 2000,
        "dt": 1e-3,
        "t_final": 0.01,
        "output_every": 5,
        "temperature": 0.25,
        "mollifier_r": 0.125,
        "trials": 2,
        "seed": 11,
    })
    return VerificationSuite(spec)


@pytest.mark.parametrize("name", [
    "spectral_round_trip",
    "kernel_antisymmetry",
    "nonlinear_manufactured",
    "mass_identity",
    "loeper_inequality",
    "uhat_stability",
    "w2_exactness",
    "circle_translated_bump",
    "moment_interpolation",
    "energy_conservation",
    "log_lipschitz_calibration",
    "density_energy_bound",
    "maxwellian_stationarity",
    "gronwall_coupling",
    "ustab_structure",
    "regularity_bound",
])
def test_property_passes(suite, name):
    result = getattr(suite, f"check_{name}")()

    assert result.name == name
    assert result.passed, result.details


def test_kernel_bound_keeps_its_report(suite):
    result = suite.check_kernel_bound()

    assert result.passed
    assert result.value <= 2.0
    assert suite.kernel_bound is not None


def test_every_property_has_a_check():
    assert len(PROPERTIES) == 19
    for name in PROPERTIES:
        assert callable(getattr(VerificationSuite, f"check_{name}"))


def test_property_generators_are_seeded_per_property(suite):
    first = suite.rng("w2_exactness").random(4)
    again = suite.rng("w2_exactness").random(4)
    other = suite.rng("w2_metric").random(4)

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_energy_conservation_reports_its_tolerance(suite):
    result = suite.check_energy_conservation()

    assert result.details["tolerance"] == 1e-2
    assert result.details["records"] == 3
    assert result.details["t_final"] == 0.01
    assert result.value >= 0.0


def test_reference_configuration_names_its_energy_tolerance():
    spec = reference_spec()

    assert spec.energy_tolerance == 1e-2
    assert spec.sim.t_final == 0.25


def test_energy_and_density_checks_share_one_run(suite):
    with mock.patch("plasma.vpme.cli.verification.run", wraps=run) as spy:
        suite.check_energy_conservation()
        suite.check_density_energy_bound()

    spy.assert_called_once()


def test_log_lipschitz_ratio_is_stable_under_refinement(suite):
    result = suite.check_log_lipschitz_calibration()

    coarse, fine = result.details["smooth"]
    assert coarse == pytest.approx(2 / (3 * math.pi), rel=0.1)
    assert fine == pytest.approx(2 / (3 * math.pi), rel=0.1)
    assert max(result.details["narrow_bump"]) <= LOG_LIPSCHITZ_CONSTANT + 1e-6


def test_maxwellian_stationarity_is_measured_against_the_initial_noise(suite):
    result = suite.check_maxwellian_stationarity()

    assert result.details["initial_deviation"] > 0.0
    assert 1.0 <= result.value <= 3.0


def test_report_writes_json_and_csv(tmp_path):
    report = VerificationReport(results=[
        PropertyResult("spectral_round_trip", True, 0.5),
        PropertyResult("w2_exactness", False, 2.0),
    ])

    paths = report.write(tmp_path)

    assert [path.name for path in paths] == ["verify.json", "verify.csv"]
    assert not report.passed
    assert report.verdicts == {"spectral_round_trip": True, "w2_exactness": False}
    data = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert data["passed"] is False
    with open(tmp_path / "verify.csv", encoding="utf-8") as verify:
        rows = list(csv.DictReader(verify))
    assert rows[0] == {"name": "spectral_round_trip", "passed": "true", "value": "0.5"}
    assert rows[1]["passed"] == "false"


def test_report_writes_kernel_bound_when_present(tmp_path):
    report = VerificationReport(kernel_bound={"r": [0.125]})

    paths = report.write(tmp_path)

    assert paths[-1].name == "kernel_bound.json"


def test_brute_force_w2_of_identical_ensembles_is_zero():
    positions = np.array([[0.1], [-0.2], [0.3]])
    velocities = np.array([[1.0], [0.0], [-1.0]])
    ensemble = ParticleEnsemble.equal_weights(positions, velocities)

    assert brute_force_w2_squared(ensemble, ensemble) == 0.0


def test_brute_force_w2_picks_the_best_permutation():
    a = ParticleEnsemble.equal_weights(np.zeros((2, 1)), np.array([[0.0], [1.0]]))
    b = ParticleEnsemble.equal_weights(np.zeros((2, 1)), np.array([[1.0], [0.0]]))

    assert brute_force_w2_squared(a, b) == 0.0


@pytest.mark.parametrize("grid, configured, expected", [
    (TorusGrid(1, 128), None, 1 / 16),
    (TorusGrid(1, 16), None, 1 / 8),
    (TorusGrid(1, 128), 0.2, 0.2),
])
def test_sweep_mollifier_width(grid, configured, expected):
    assert sweep_mollifier_width(grid, configured) == expected
