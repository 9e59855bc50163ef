"""Backend switch for the hot kernels.

Kernels are written once in the numba-compatible subset of Python. When
``ROBUSTGAP_NUMBA=0`` is set (or numba is missing) they run as plain
Python/numpy instead; a few kernels also carry a separate vectorised numpy
implementation, selected through :func:`pick`.
"""
from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("ROBUSTGAP_NUMBA", "1") != "0"


def njit(fn=None, **options):
    """``numba.njit`` when enabled, identity otherwise."""
    options.setdefault("cache", True)

    def wrap(f):
        if not NUMBA_ENABLED:
            return f
        return numba.njit(**options)(f)

    if fn is None:
        return wrap
    return wrap(fn)


def pick(jitted, fallback):
    return jitted if NUMBA_ENABLED else fallback


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
