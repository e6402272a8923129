"""Kernel backend selection.

Hot loops (tree split search, tree traversal, SVM epochs) ship in two forms: a
numba ``@njit`` kernel and a pure-numpy equivalent. ``REVIEWTOX_BACKEND``
chooses between them at import time (``numba`` or ``numpy``); the default is
numba when it imports, numpy otherwise.
"""

import contextlib
import os
import warnings

BACKEND_ENV = "REVIEWTOX_BACKEND"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _resolve() -> str:
    requested = os.environ.get(BACKEND_ENV, "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
        warnings.warn("numba requested but not importable; using numpy kernels")
        return "numpy"
    return requested


BACKEND = _resolve()


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        import numba

        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch kernels (for tests and benchmarks)."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    prev, BACKEND = BACKEND, name
    try:
        yield
    finally:
        BACKEND = prev
