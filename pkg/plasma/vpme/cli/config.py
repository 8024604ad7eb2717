"""
Scenario configuration files.

A configuration file is a YAML mapping of flat ``key: value`` pairs. Every
key is optional and documented in :data:`SCHEMA`; unknown keys are errors.


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
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import yaml

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import GridError, ParseError, UnknownKey
from plasma.vpme.domain import TorusGrid
from plasma.vpme.mollifier.mollifier import MAX_WIDTH, MIN_WIDTH_IN_CELLS
from plasma.vpme.particles import InitialData, SimConfig
from plasma.vpme.transport import Perturbation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfigKey:
    name: str
    kind: type
    default: Any
    help: str
    nullable: bool = False


SCHEMA: Dict[str, ConfigKey] = {key.name: key for key in (
    ConfigKey("dim", int, 1, "torus dimension (1 or 2)"),
    ConfigKey("grid", int, 64, "cells per dimension, a power of two >= 8"),
    ConfigKey("n", int, 10000, "particle count"),
    ConfigKey("dt", float, 0.01, "time step, 0 for a diagnostics-only run"),
    ConfigKey("t_final", float, 1.0, "final time"),
    ConfigKey("seed", int, 0, "seed of the single run generator"),
    ConfigKey("mollifier_r", float, None, "mollifier width, null for the unregularised system",
              nullable=True),
    ConfigKey("deposition", str, "linear", "deposition stencil"),
    ConfigKey("output_every", int, 10, "steps between diagnostics records"),
    ConfigKey("newton_tol", float, 1e-10, "nonlinear Poisson residual tolerance"),
    ConfigKey("newton_max_iters", int, 50, "Newton iteration cap"),
    ConfigKey("mollify_diagnostics", bool, False, "density norms from the mollified density"),
    ConfigKey("initial", str, "perturbed_maxwellian", "initial data kind"),
    ConfigKey("temperature", float, 1.0, "ion temperature"),
    ConfigKey("amplitude", float, 0.05, "density perturbation amplitude"),
    ConfigKey("mode", int, 1, "perturbation wave number"),
    ConfigKey("drift", float, 1.0, "two-stream drift speed"),
    ConfigKey("sampler", str, None, "module:callable or entry point name for custom data",
              nullable=True),
    ConfigKey("k0", float, 3.0, "velocity decay exponent"),
    ConfigKey("m0", float, 4.0, "propagated moment order"),
    ConfigKey("perturbation", float, 1e-4, "coupled-run initial displacement"),
    ConfigKey("trials", int, 100, "inequality sweep sizes"),
    ConfigKey("energy_tolerance", float, None, "asserted relative energy drift", nullable=True),
    ConfigKey("density", str, None, "density snapshot for solve-poisson", nullable=True),
)}


def _coerce(key: ConfigKey, value: Any, line: Optional[int]) -> Any:
    if value is None:
        if key.nullable:
            return None
        raise ParseError(line, f"{key.name} must not be null")
    if key.kind is bool:
        if isinstance(value, bool):
            return value
    elif key.kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif key.kind is float:
        # YAML 1.1 reads exponents without a dot, like 1e-10, as strings.
        if isinstance(value, (int, float, str)) and not isinstance(value, bool):
            try:
                number = float(value)
            except ValueError:
                number = math.nan
            if math.isfinite(number):
                return number
    elif isinstance(value, str):
        return value
    raise ParseError(line, f"{key.name} expects {key.kind.__name__}, got {value!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything a scenario needs, built from one validated mapping."""
    values: Mapping[str, Any]
    sim: SimConfig
    initial: InitialData
    perturbation: Perturbation

    @property
    def trials(self) -> int:
        return self.values["trials"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    @property
    def energy_tolerance(self) -> Optional[float]:
        return self.values["energy_tolerance"]

    @property
    def density(self) -> Optional[str]:
        return self.values["density"]

    def as_mapping(self) -> Dict[str, Any]:
        return dict(self.values)

    def replace(self, **changes) -> "ScenarioSpec":
        """New spec with some keys overridden, e.g. the seed from the command line."""
        values = self.as_mapping()
        for name, value in changes.items():
            if name not in SCHEMA:
                raise UnknownKey(name)
            values[name] = _coerce(SCHEMA[name], value, None)
        return config_from_mapping(values)


def _build(values: Dict[str, Any], lines: Mapping[str, int]) -> ScenarioSpec:
    def line_of(name):
        return lines.get(name)

    try:
        grid = TorusGrid(values["dim"], values["grid"])
    except GridError as exc:
        raise ParseError(line_of("grid") or line_of("dim"), str(exc)) from exc

    width = values["mollifier_r"]
    if width is not None and not MIN_WIDTH_IN_CELLS * grid.spacing <= width <= MAX_WIDTH:
        raise ParseError(
            line_of("mollifier_r"),
            f"mollifier_r must lie in [{MIN_WIDTH_IN_CELLS * grid.spacing}, {MAX_WIDTH}]",
        )

    sim = SimConfig(
        grid=grid,
        n_particles=values["n"],
        dt=values["dt"],
        t_final=values["t_final"],
        seed=values["seed"],
        mollifier_r=width,
        deposition=values["deposition"],
        output_every=values["output_every"],
        newton_tol=values["newton_tol"],
        newton_max_iters=values["newton_max_iters"],
        mollify_diagnostics=values["mollify_diagnostics"],
    )
    initial = InitialData(
        kind=values["initial"],
        temperature=values["temperature"],
        amplitude=values["amplitude"],
        mode=values["mode"],
        drift=values["drift"],
        sampler=values["sampler"],
        k0=values["k0"],
        m0=values["m0"],
    )
    if values["trials"] < 1:
        raise ParseError(line_of("trials"), "trials must be positive")
    return ScenarioSpec(values, sim, initial, Perturbation(displacement=values["perturbation"]))


def config_from_mapping(mapping: Mapping[str, Any],
                        lines: Optional[Mapping[str, int]] = None) -> ScenarioSpec:
    """
    :raises UnknownKey: for a key outside :data:`SCHEMA`.
    :raises ParseError: for a value of the wrong type or out of range.
    """
    lines = lines or {}
    values = {name: key.default for name, key in SCHEMA.items()}
    for name, value in mapping.items():
        if name not in SCHEMA:
            raise UnknownKey(name)
        values[name] = _coerce(SCHEMA[name], value, lines.get(name))
    return _build(values, lines)


def _mark_line(exc: yaml.YAMLError) -> Optional[int]:
    mark = getattr(exc, "problem_mark", None) or getattr(exc, "context_mark", None)
    return mark.line + 1 if mark is not None else None


def parse_config_text(text: str) -> ScenarioSpec:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        raise ParseError(_mark_line(exc), str(exc)) from exc

    if node is None:
        return config_from_mapping({})
    if not isinstance(node, yaml.MappingNode):
        raise ParseError(node.start_mark.line + 1, "configuration must be a mapping of key: value")

    lines: Dict[str, int] = {}
    for key_node, value_node in node.value:
        line = key_node.start_mark.line + 1
        if not isinstance(key_node, yaml.ScalarNode) or not isinstance(value_node, yaml.ScalarNode):
            raise ParseError(line, "configuration keys and values must be plain scalars")
        if key_node.value in lines:
            raise ParseError(line, f"duplicate key {key_node.value!r}")
        if key_node.value not in SCHEMA:
            raise UnknownKey(key_node.value)
        lines[key_node.value] = line

    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(_mark_line(exc), str(exc)) from exc
    return config_from_mapping({str(name): value for name, value in mapping.items()}, lines)


def parse_config(path: Union[str, Path]) -> ScenarioSpec:
    """
    :raises ParseError: if the file can not be read or parsed.
    :raises UnknownKey: for a key outside the schema.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(None, f"can not read {path}: {exc}") from exc
    spec = parse_config_text(text)
    logger.info("Loaded configuration from %s", path)
    return spec


def serialise_config(spec: ScenarioSpec) -> str:
    return yaml.safe_dump(spec.as_mapping(), sort_keys=False)


def default_spec() -> ScenarioSpec:
    return config_from_mapping({})


def schema_rows() -> Tuple[Tuple[str, Any, str], ...]:
    """(key, default, meaning) for every documented key."""
    return tuple((key.name, key.default, key.help) for key in SCHEMA.values())


REFERENCE_VALUES: Dict[str, Any] = {
    "dim": 1,
    "grid": 128,
    "n": 20000,
    "dt": 1e-3,
    "t_final": 0.25,
    "temperature": 0.25,
    "mollifier_r": 0.0625,
    "output_every": 25,
    "energy_tolerance": 1e-2,
}


def reference_spec() -> ScenarioSpec:
    """
    Desk-scale regularised run used by ``verify`` when no configuration is
    given; its time step satisfies the CFL bound at the sampled speeds.
    """
    return config_from_mapping(REFERENCE_VALUES)
