"""Optional numba acceleration for the hot loops.

Set ``SIM_DISABLE_NUMBA=1`` to run every kernel as plain numpy/python. The
kernels are written so that both paths execute the same arithmetic.
"""
import os

NUMBA_DISABLED = os.environ.get("SIM_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:
    if NUMBA_DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    _njit = None
    HAS_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available and enabled, identity otherwise."""
    if HAS_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend():
    return "numba" if HAS_NUMBA else "numpy"
