"""
Logging setup shared by every vpme module.

Modules do ``from plasma.vpme.core import logging`` and then
``logger = logging.getLogger(__name__)``.


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

import logging
import logging.handlers
import os
from typing import Optional

ROOT_LOGGER_NAME = "plasma.vpme"
LOG_FILENAME = "vpme.log"
LOG_FORMAT = "%(asctime)s | %(name)s:%(lineno)d | %(levelname)s | %(message)s"
MAX_LOG_BYTES = 3 * 1024 * 1024
BACKUP_COUNT = 2

DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR


def getLogger(name: str) -> logging.Logger:  # pylint: disable=invalid-name
    """Returns the logger for the given module name."""
    return logging.getLogger(name)


def config(level: int = logging.INFO, logdirpath: Optional[str] = None) -> logging.Logger:
    """
    Configures the package logger.

    A console handler is always installed. When ``logdirpath`` is given,
    a rotating file handler writing ``vpme.log`` into that directory is
    installed as well. Calling this function again replaces the handlers
    installed by a previous call.

    :param level: console log level.
    :param logdirpath: optional directory for the log file.
    :returns: the package root logger.
    """
    root = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    console = logging.StreamHandler()
    console.setLevel(level)
    console.setFormatter(formatter)
    root.addHandler(console)

    if logdirpath:
        os.makedirs(logdirpath, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            os.path.join(logdirpath, LOG_FILENAME),
            maxBytes=MAX_LOG_BYTES, backupCount=BACKUP_COUNT, encoding="utf-8"
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    root.setLevel(logging.DEBUG if logdirpath else level)
    root.propagate = False
    return root
