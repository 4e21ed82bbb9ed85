"""Kernel backend selection.

The hot inner loops (edge shuffling, exposure counting) ship in two
variants: numba ``@njit`` loops in :mod:`hcat.kernels.njit_kernels` and
vectorized numpy in :mod:`hcat.kernels.numpy_kernels`.  The numba
variant is used when numba imports cleanly; setting the environment
variable ``HCAT_DISABLE_NUMBA=1`` forces the numpy fallback.  The flag
is read on every dispatch so tests can flip backends at runtime.
"""

from __future__ import annotations

import os
import warnings

DISABLE_ENV = "HCAT_DISABLE_NUMBA"

_TRUTHY = {"1", "true", "yes", "on"}

_numba_import_failed = False


def numba_disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in _TRUTHY


def numba_available() -> bool:
    """True when numba can be imported (result cached after first failure)."""
    global _numba_import_failed
    if _numba_import_failed:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        _numba_import_failed = True
        return False
    return True


def active_backend() -> str:
    """Name of the backend the next kernel dispatch will use."""
    if numba_disabled_by_env():
        return "numpy"
    if not numba_available():
        warnings.warn(
            "numba unavailable; falling back to numpy kernels", RuntimeWarning, stacklevel=2
        )
        return "numpy"
    return "numba"


def get_kernels():
    """Return the kernel module for the active backend."""
    if active_backend() == "numba":
        from hcat.kernels import njit_kernels

        return njit_kernels
    from hcat.kernels import numpy_kernels

    return numpy_kernels
