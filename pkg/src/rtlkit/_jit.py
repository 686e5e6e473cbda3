"""Numba switch.

Set ``RTLKIT_DISABLE_JIT=1`` to run every kernel through its pure-numpy
fallback (useful for debugging, or where numba is unavailable).
"""

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

NUMBA_AVAILABLE = _numba is not None
JIT_ENABLED = NUMBA_AVAILABLE and os.environ.get("RTLKIT_DISABLE_JIT", "0").lower() not in ("1", "true", "yes")


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise.

    Decoration happens regardless of the env flag so the benchmark can time
    both paths in one process; the flag only controls dispatch.
    """
    if NUMBA_AVAILABLE:
        kwargs.setdefault("cache", False)
        if func is not None:
            return _numba.njit(**kwargs)(func)
        return _numba.njit(**kwargs)
    if func is not None:
        return func

    def wrapper(f):
        return f

    return wrapper
