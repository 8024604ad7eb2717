"""
Worker parallelism cap read from the VPME_THREADS environment variable.


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

import os
from typing import Mapping, Optional

from plasma.vpme.core import logging
from plasma.vpme.core.exceptions import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "VPME_THREADS"
DEFAULT_WORKERS = 1


def worker_count(environ: Optional[Mapping[str, str]] = None) -> int:
    """
    Returns the maximum number of workers numerical kernels may use.

    :param environ: environment mapping, ``os.environ`` by default.
    :raises ConfigError: if the variable is set to something other than a
        positive integer.
    """
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_WORKERS

    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from exc

    if workers < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")

    logger.debug("Using %d workers", workers)
    return workers
