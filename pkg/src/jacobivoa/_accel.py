"""Backend selection for the compiled kernels.

Set ``JACOBIVOA_DISABLE_NUMBA=1`` to force the pure-numpy code path. The
flag is read once at import time; individual kernel calls may still pick a
backend explicitly through their ``backend`` argument.
"""

import os

_FLAG = os.environ.get("JACOBIVOA_DISABLE_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

NUMBA_ENABLED = NUMBA_REQUESTED and NUMBA_AVAILABLE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity."""
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def resolve_backend(backend=None):
    if backend is None:
        return "numba" if NUMBA_ENABLED else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
