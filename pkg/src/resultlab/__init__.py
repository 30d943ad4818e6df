"""Executable checks and simulations for a set of combinatorial, online-algorithm
and numerical results.  See ``resultlab.harness`` for the experiment registry."""
from __future__ import annotations

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
