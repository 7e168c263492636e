"""numba switch.

Kernels are compiled with ``numba.njit`` when numba is importable and the
environment variable ``RT_DISABLE_NUMBA`` is unset (or ``0``).  Otherwise the
pure-numpy fallbacks in :mod:`ruelle_torsion.kernels` are used.
"""

import os

_disabled = os.environ.get("RT_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("disabled by RT_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
