"""
Initial data kinds and their samplers.

Built-in kinds are sampled directly. A ``custom`` kind names its sampler
either as an entry point of the ``vpme_initial_data`` group or as a
``module:callable`` path. A sampler is called as
``sampler(rng, n_particles, dim, data)`` and returns position and velocity
arrays of shape (n_particles, dim).


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
import pkgutil
from dataclasses import dataclass
from importlib.metadata import entry_points
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import ConfigError, UnknownKind
from plasma.vpme.domain import wrap_positions
from plasma.vpme.particles.config import SimConfig
from plasma.vpme.particles.ensemble import ParticleEnsemble

logger = logging.getLogger(__name__)

ENTRY_POINT_GROUP = "vpme_initial_data"
CUSTOM_KIND = "custom"


@dataclass(frozen=True)
class InitialData:  # pylint: disable=too-many-instance-attributes
    """
    Initial ion distribution.

    ``k0`` is the velocity decay exponent in f0 <= C0 / (1 + |v|^k0) and
    ``m0`` the order of the velocity moment expected to stay finite. Both
    are bookkeeping for the analytic kinds, whose Gaussian tails satisfy the
    decay bound for every k0.
    """
    kind: str = "perturbed_maxwellian"
    temperature: float = 1.0
    amplitude: float = 0.05
    mode: int = 1
    drift: float = 1.0
    sampler: Optional[str] = None
    k0: float = 3.0
    m0: float = 4.0

    def __post_init__(self):
        if self.temperature <= 0.0:
            raise ConfigError(f"temperature must be positive, got {self.temperature}")
        if not abs(self.amplitude) < 1.0:
            raise ConfigError(f"|amplitude| must be below 1, got {self.amplitude}")
        if self.mode < 1:
            raise ConfigError(f"mode must be a positive integer, got {self.mode}")
        if self.k0 <= 0.0 or self.m0 <= 0.0:
            raise ConfigError("k0 and m0 must be positive")

    @property
    def thermal_speed(self) -> float:
        return math.sqrt(self.temperature)

    def check_hypotheses(self, dim: int) -> bool:
        """
        Logs a warning when k0 <= d or m0 <= d(d - 1), for which the
        existence and uniqueness results no longer apply.
        """
        satisfied = True
        if self.k0 <= dim:
            logger.warning("Decay exponent k0=%s is not above d=%d", self.k0, dim)
            satisfied = False
        if self.m0 <= dim * (dim - 1):
            logger.warning("Moment order m0=%s is not above d(d-1)=%d", self.m0, dim * (dim - 1))
            satisfied = False
        return satisfied


Sampler = Callable[[np.random.Generator, int, int, InitialData], Tuple[np.ndarray, np.ndarray]]


def _uniform_positions(rng: np.random.Generator, n_particles: int, dim: int) -> np.ndarray:
    return rng.random((n_particles, dim)) - 0.5


def _perturbed_positions(rng: np.random.Generator, n_particles: int, dim: int,
                         amplitude: float, mode: int) -> np.ndarray:
    """Rejection sampling of the density 1 + amplitude * cos(2 pi mode x_1)."""
    ceiling = 1.0 + abs(amplitude)
    accepted = []
    missing = n_particles
    while missing > 0:
        candidates = _uniform_positions(rng, 2 * missing + 16, dim)
        thresholds = rng.random(candidates.shape[0]) * ceiling
        density = 1.0 + amplitude * np.cos(2.0 * np.pi * mode * candidates[:, 0])
        kept = candidates[thresholds <= density][:missing]
        accepted.append(kept)
        missing -= kept.shape[0]
    return np.concatenate(accepted)


def _maxwellian(rng: np.random.Generator, n_particles: int, dim: int,
                temperature: float) -> np.ndarray:
    return rng.normal(0.0, math.sqrt(temperature), size=(n_particles, dim))


def sample_uniform_maxwellian(rng, n_particles, dim, data):
    positions = _uniform_positions(rng, n_particles, dim)
    return positions, _maxwellian(rng, n_particles, dim, data.temperature)


def sample_perturbed_maxwellian(rng, n_particles, dim, data):
    positions = _perturbed_positions(rng, n_particles, dim, data.amplitude, data.mode)
    return positions, _maxwellian(rng, n_particles, dim, data.temperature)


def sample_two_stream(rng, n_particles, dim, data):
    """Two counter-propagating Maxwellian beams drifting along the first axis."""
    positions = _perturbed_positions(rng, n_particles, dim, data.amplitude, data.mode)
    velocities = _maxwellian(rng, n_particles, dim, data.temperature)
    signs = np.where(np.arange(n_particles) % 2 == 0, 1.0, -1.0)
    velocities[:, 0] += signs * data.drift
    return positions, velocities


SAMPLERS: Dict[str, Sampler] = {
    "uniform_maxwellian": sample_uniform_maxwellian,
    "perturbed_maxwellian": sample_perturbed_maxwellian,
    "two_stream": sample_two_stream,
}

KINDS = tuple(SAMPLERS) + (CUSTOM_KIND,)


def resolve_sampler(data: InitialData) -> Sampler:
    """
    :raises UnknownKind: if neither a built-in kind nor a resolvable custom sampler.
    """
    if data.kind in SAMPLERS:
        return SAMPLERS[data.kind]
    if data.kind != CUSTOM_KIND:
        raise UnknownKind(data.kind)
    if not data.sampler:
        raise UnknownKind(f"{CUSTOM_KIND} (no sampler given)")

    for entry_point in entry_points(group=ENTRY_POINT_GROUP):
        if entry_point.name == data.sampler:
            return entry_point.load()

    if ":" in data.sampler:
        try:
            return pkgutil.resolve_name(data.sampler)
        except (ImportError, AttributeError, ValueError) as exc:
            raise UnknownKind(data.sampler) from exc
    raise UnknownKind(data.sampler)


def sample_initial(cfg: SimConfig, data: InitialData) -> ParticleEnsemble:
    """
    Draws ``cfg.n_particles`` equally weighted particles, deterministically
    from ``cfg.seed``.
    """
    sampler = resolve_sampler(data)
    rng = np.random.default_rng(cfg.seed)
    positions, velocities = sampler(rng, cfg.n_particles, cfg.grid.dim, data)
    data.check_hypotheses(cfg.grid.dim)
    ensemble = ParticleEnsemble.equal_weights(wrap_positions(positions), velocities, cfg.seed)
    logger.info("Sampled %d particles of kind %s (seed=%d)",
                ensemble.n_particles, data.kind, cfg.seed)
    return ensemble


def empirical_moment(ensemble: ParticleEnsemble, order: float) -> float:
    return float(np.sum(ensemble.weights * ensemble.speeds() ** order))


def check_decay(ensemble: ParticleEnsemble, data: InitialData) -> float:
    """
    Empirical m0-moment of a sampled ensemble.

    :raises ValueError: if it is not finite.
    """
    value = empirical_moment(ensemble, data.m0)
    if not math.isfinite(value):
        raise ValueError(f"Empirical moment of order {data.m0} is not finite")
    return value
