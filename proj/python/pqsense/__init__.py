# Copyright 2026 The pqsense Authors
# SPDX-License-Identifier: Apache-2.0

"""Twin-beam quadrant plasmonic sensing model."""

from ._core import *  # noqa: F401,F403
from ._core import (
    Error,
    FitError,
    IoError,
    NumericError,
    SearchError,
    ValidationError,
)

__version__ = "0.1.0"
