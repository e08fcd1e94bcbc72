"""Selects the numba-compiled kernels or the pure-numpy fallbacks.

Set ``BELLPHASE_DISABLE_NUMBA=1`` before import to force the numpy path.
"""
import os

_DISABLED = os.environ.get("BELLPHASE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is an optional extra
    _njit = None

HAVE_NUMBA = _njit is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """``numba.njit(cache=True)`` when numba is usable, otherwise a no-op."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)
