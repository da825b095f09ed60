"""Optional numba acceleration.

Kernels are written as plain loops over numpy arrays so they run unchanged
under the interpreter. Set ``TFDA_NO_NUMBA=1`` to force the pure-Python path
(useful for debugging and for the benchmark that compares both paths).
"""

import os

_flag = os.environ.get("TFDA_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def njit(*args, **kwargs):
    """``numba.njit`` when available and enabled, identity decorator otherwise."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(func):
        return func

    return wrap


def python_version(func):
    """Return the interpreted implementation behind a (possibly) jitted kernel."""
    return getattr(func, "py_func", func)
