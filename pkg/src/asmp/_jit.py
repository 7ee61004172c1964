"""numba switch.

Set ``ASMP_DISABLE_NUMBA=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``) to run
every kernel as plain Python on numpy arrays. Both paths share one source.
"""

import os

_FLAG = os.environ.get("ASMP_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no") or "NUMBA_DISABLE_JIT" in os.environ

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
    jit = numba.njit(cache=True, nogil=True)
except ImportError:
    NUMBA_ENABLED = False

    def jit(func):
        return func
