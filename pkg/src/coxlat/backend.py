"""Backend selection for the hot kernels.

The heavy integer loops ship in two interchangeable implementations: a
numba-compiled one and a reference one built from numpy and exact Python
arithmetic.  ``COXLAT_BACKEND=numba`` or ``COXLAT_BACKEND=numpy`` forces a
choice; unset, numba is used when importable.  The backend never changes any
result, only how fast it arrives, and ``python -m coxlat.bench`` measures the
difference.
"""

from __future__ import annotations

import os


def _detect() -> str:
    choice = os.environ.get("COXLAT_BACKEND", "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        try:
            import numba  # noqa: F401
        except ImportError as exc:
            raise RuntimeError("COXLAT_BACKEND=numba but numba is not importable") from exc
        return "numba"
    if choice:
        raise RuntimeError(f"unknown COXLAT_BACKEND value {choice!r} (use 'numba' or 'numpy')")
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _detect()

if BACKEND == "numba":
    from numba import njit
else:
    def njit(*args, **kwargs):
        """No-op stand-in so kernel modules import cleanly without numba."""
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


def using_numba() -> bool:
    return BACKEND == "numba"
