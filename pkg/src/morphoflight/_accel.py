"""Numba switch.

Set ``MORPHOFLIGHT_DISABLE_NUMBA=1`` to run every hot kernel through its
pure-numpy implementation instead of the compiled one.
"""
import os

_DISABLED = os.environ.get("MORPHOFLIGHT_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    _njit = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


def use_numba() -> bool:
    return HAVE_NUMBA
