"""Optional numba acceleration for the numeric kernels.

Kernels are written once as plain Python over numpy arrays. When numba is
importable they are compiled with ``njit``; otherwise (or when the
``MULTIRABI_DISABLE_NUMBA`` environment variable is set to a truthy value)
the same source runs under the interpreter.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested():
    return os.environ.get("MULTIRABI_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    if not _numba_requested():
        raise ImportError("numba disabled by MULTIRABI_DISABLE_NUMBA")
    from numba import njit as _njit
    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False


def jit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


def backend_name():
    return "numba" if USE_NUMBA else "python"
