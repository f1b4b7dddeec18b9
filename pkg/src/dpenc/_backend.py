"""Kernel backend selection.

Hot loops are compiled with numba when it is importable. Setting the
environment variable ``DPENC_BACKEND=numpy`` (before import) forces the
pure-numpy path; :func:`set_backend` switches at runtime.
"""

from __future__ import annotations

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy")

_requested = os.environ.get("DPENC_BACKEND", "numba").strip().lower() or "numba"
if _requested not in BACKENDS:
    raise ImportError(f"DPENC_BACKEND must be one of {BACKENDS}, got {_requested!r}")

_active = _requested if (_requested == "numpy" or HAS_NUMBA) else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with project defaults, or identity when numba is missing."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if not HAS_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def get_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previously active one."""
    global _active
    name = name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    previous, _active = _active, name
    return previous
