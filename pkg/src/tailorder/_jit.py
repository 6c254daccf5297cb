"""Optional numba acceleration.

Kernels are written once, in the subset of Python that numba compiles.
Setting ``TAILORDER_NO_NUMBA=1`` (or running without numba installed) turns
``njit`` into the identity decorator, so the same source runs as plain
Python/numpy. The benchmark in ``benchmarks/`` compares the two paths.
"""

import os

_DISABLED = os.environ.get("TAILORDER_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when acceleration is on, identity otherwise."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
