"""Kernel backend selection.

Every hot kernel ships in two implementations: numba ``@njit`` loops and a
pure-numpy fallback. The numba path is the default whenever numba imports;
set ``TOPOCTX_BACKEND=numpy`` (or call :func:`set_backend`) to force the
fallback. Both paths are integer/float-exact by construction, so results
are bit-identical across backends.
"""

from __future__ import annotations

import os

ENV_VAR = "TOPOCTX_BACKEND"
BACKENDS = ("numba", "numpy")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    HAVE_NUMBA = False


def _initial() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice and choice not in BACKENDS:
        raise ValueError(
            f"{ENV_VAR} must be one of {BACKENDS}, got {choice!r}"
        )
    if choice == "numba" and not HAVE_NUMBA:
        raise ImportError(f"{ENV_VAR}=numba requested but numba is not installed")
    if not choice:
        choice = "numba" if HAVE_NUMBA else "numpy"
    return choice


_active = _initial()


def active_backend() -> str:
    """Name of the backend currently dispatching kernels."""
    return _active


def set_backend(name: str) -> None:
    """Switch backends at runtime; used by tests and benchmarks."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ImportError("numba backend requested but numba is not installed")
    _active = name
