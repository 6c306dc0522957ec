"""Numba switch for the hot kernels.

Set ``CASIMIR_CONE_NO_NUMBA=1`` before import to run the pure-numpy paths
instead of the compiled ones. Both paths are kept in sync by the test suite.
"""

import os

_DISABLED = os.environ.get("CASIMIR_CONE_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def jit(fn):
    """Compile ``fn`` with numba when enabled, else return it untouched."""
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn
