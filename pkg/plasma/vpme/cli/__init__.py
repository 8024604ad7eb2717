"""
Command line interface.

Subcommands map onto scenarios: ``solve-poisson`` runs poisson-verify,
``simulate`` and ``stability`` run their namesakes and ``verify`` runs
verify-all.


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

import argparse
from pathlib import Path
from typing import List, Optional

from plasma.vpme.cli.config import (
    SCHEMA, ScenarioSpec, config_from_mapping, default_spec, parse_config, parse_config_text,
    reference_spec, schema_rows, serialise_config
)
from plasma.vpme.cli.scenarios import (
    EXIT_CONFIG, SCENARIOS, RunManifest, ScenarioResult, exit_code_for, run_scenario,
    write_failure
)
from plasma.vpme.cli.verification import PROPERTIES, VerificationSuite, verify_all
from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import ConfigError

COMMANDS = {
    "solve-poisson": "poisson-verify",
    "simulate": "simulate",
    "stability": "stability",
    "verify": "verify-all",
}

COMMAND_HELP = {
    "solve-poisson": "solve the split Poisson problem for a density snapshot or a manufactured "
                     "case",
    "simulate": "run the particle simulation and record diagnostics",
    "stability": "coupled run and potential stability inequality sweeps",
    "verify": "run the full verification suite",
}


def _schema_epilog() -> str:
    lines = ["configuration keys (key: default, meaning):"]
    lines.extend(f"  {name}: {default} - {meaning}" for name, default, meaning in schema_rows())
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpme",
        description="Vlasov-Poisson with massless electrons on the periodic torus.",
        epilog=_schema_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, help_text in COMMAND_HELP.items():
        subparser = subparsers.add_parser(command, help=help_text)
        subparser.add_argument("--config", type=Path, help="YAML configuration file")
        subparser.add_argument("--out", type=Path, default=Path("vpme-out"),
                               help="output directory (default: vpme-out)")
        subparser.add_argument("--seed", type=int, help="overrides the configured seed")
        subparser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
        if command == "solve-poisson":
            subparser.add_argument("--density", type=Path, help="density field snapshot")
    return parser


def load_spec(config: Optional[Path], seed: Optional[int] = None,
              density: Optional[Path] = None, command: str = "simulate") -> ScenarioSpec:
    if config is not None:
        spec = parse_config(config)
    else:
        spec = reference_spec() if command == "verify" else default_spec()
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if density is not None:
        overrides["density"] = str(density)
    return spec.replace(**overrides) if overrides else spec


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.config(level=logging.WARNING if args.quiet else logging.INFO,
                   logdirpath=str(args.out))
    try:
        spec = load_spec(args.config, args.seed, getattr(args, "density", None), args.command)
    except ConfigError as exc:
        logging.getLogger(__name__).error("Invalid configuration: %s", exc)
        write_failure(args.out, exc, EXIT_CONFIG)
        return EXIT_CONFIG
    return run_scenario(COMMANDS[args.command], spec, args.out)


__all__ = [
    "main", "build_parser", "load_spec", "COMMANDS",
    "ScenarioSpec", "SCHEMA", "parse_config", "parse_config_text", "config_from_mapping",
    "serialise_config", "default_spec", "reference_spec",
    "SCENARIOS", "RunManifest", "ScenarioResult", "run_scenario", "exit_code_for",
    "VerificationSuite", "PROPERTIES", "verify_all",
]
