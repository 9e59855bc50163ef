"""Tasks that are easy to learn but hard to learn robustly, at desk scale."""
from __future__ import annotations

from ._accel import backend
from .rng import RngStream

__version__ = "0.1.0"
__all__ = ["RngStream", "backend", "__version__"]
