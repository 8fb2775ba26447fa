"""Comonotonicity-based dependence measures (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import Error, JointModel

__version__ = "0.1.0"
