"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of numpy. They are compiled
with ``numba.njit`` unless ``ENTANGLE_BOUNDARY_NUMBA`` is set to ``0`` (or numba
is missing), in which case the very same functions run under the interpreter.
Either way the uncompiled function is reachable as ``kernel_fn.py_func``.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("ENTANGLE_BOUNDARY_NUMBA", "1").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in ("0", "false", "no", "off")


def kernel(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    fn.py_func = fn
    return fn
