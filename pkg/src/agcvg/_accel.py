"""Numba switch.

Kernels are compiled with ``numba.njit`` unless ``AGCVG_DISABLE_NUMBA`` is set
to a truthy value (or numba is not importable), in which case the pure
numpy/python versions in :mod:`agcvg.kernels` are used instead.
"""
import os

_FLAG = os.environ.get("AGCVG_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True)(func)
