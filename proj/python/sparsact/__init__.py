"""Sparse actuator scheduling and noisy tracking for linear network systems.

Thin wrapper over the compiled extension; everything lives in ``_core``.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
