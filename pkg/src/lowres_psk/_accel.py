"""Kernel backend selection.

Hot loops are written once in a numba-compatible subset of numpy.  When
numba is importable and ``LOWRES_PSK_NO_NUMBA`` is unset (or ``0``), they
are compiled with ``@njit``; otherwise the same source runs as plain
numpy/Python.  The flag is read once at import time.
"""

import os

_disabled = os.environ.get("LOWRES_PSK_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag in a subprocess
    numba = None
    USING_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise.

    Usable bare (``@njit``) or with options (``@njit(cache=True)``).
    """
    if USING_NUMBA:
        if args and callable(args[0]):
            return numba.njit(**kwargs)(args[0])
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def backend() -> str:
    return "numba" if USING_NUMBA else "numpy"
