# SPDX-License-Identifier: Apache-2.0
"""Movable-antenna ISAC beampattern optimization (python bindings)."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
