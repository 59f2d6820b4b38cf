"""Numba acceleration switch.

Hot kernels in :mod:`uavrelay.kernels` ship in two flavours: a numba
``@njit`` build and a pure numpy/python fallback. The active flavour is
chosen once at import time: numba is used when it is importable and the
environment variable ``UAV_RELAY_NO_NUMBA`` is not set to a truthy value.
"""

import os

DISABLE_ENV_VAR = "UAV_RELAY_NO_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    numba = None
    HAVE_NUMBA = False


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV_VAR, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(func, cache=True)
    return func


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
