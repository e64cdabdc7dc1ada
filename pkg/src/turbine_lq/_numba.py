"""JIT shim: ``@njit`` when numba is usable, plain Python otherwise.

All hot kernels in this package are written as scalar/loop code that runs
with or without compilation.  Set ``TURBINE_LQ_DISABLE_JIT=1`` to force
the pure NumPy/Python path: no compilation, results matching the compiled
path to floating-point rounding (a few ulps; every run is bit-reproducible
within one mode).  The same fallback engages automatically when numba is
not installed.  ``JIT_ENABLED`` reports which path is active.
"""

import os


def _identity_njit(*args, **kwargs):
    if args and callable(args[0]):
        return args[0]

    def decorate(fn):
        return fn

    return decorate


_DISABLED = os.environ.get("TURBINE_LQ_DISABLE_JIT", "").strip().lower() in {
    "1",
    "true",
    "yes",
}

if _DISABLED:
    njit = _identity_njit
    JIT_ENABLED = False
else:
    try:
        from numba import njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        njit = _identity_njit
        JIT_ENABLED = False
