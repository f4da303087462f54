"""Kernel backend selection.

The hot inner loops (Yee updates, CPML recursions, geometry coverage
counting) exist in two implementations: numba-jitted loops and plain numpy
slicing. The numba path is the default whenever numba imports; set
``NANOCAV_BACKEND=numpy`` to force the fallback. Both paths perform the
same arithmetic per element in the same order, so fields agree bitwise.
"""

from __future__ import annotations

import os

from . import kernels_numpy

try:
    from . import kernels_numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    kernels_numba = None
    HAS_NUMBA = False

ENV_VAR = "NANOCAV_BACKEND"


def available() -> tuple[str, ...]:
    return ("numba", "numpy") if HAS_NUMBA else ("numpy",)


def default_backend() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice:
        if choice not in ("numba", "numpy"):
            raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
        if choice == "numba" and not HAS_NUMBA:
            raise ImportError("numba backend requested but numba is not importable")
        return choice
    return "numba" if HAS_NUMBA else "numpy"


def get_kernels(name: str | None = None):
    """Return the kernel module for `name` (or the environment default)."""
    name = name or default_backend()
    if name == "numba":
        if not HAS_NUMBA:
            raise ImportError("numba backend requested but numba is not importable")
        return kernels_numba
    if name == "numpy":
        return kernels_numpy
    raise ValueError(f"unknown backend {name!r}")
