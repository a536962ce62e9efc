"""Integration-kernel facade.

Selects the compiled Cython kernel when available, otherwise the pure-python
reference implementation.  ``GEOPOL_PURE_PYTHON=1`` forces the fallback.
Both backends expose the same ``integrate_path`` contract and system ids.
"""

import os

if os.environ.get("GEOPOL_PURE_PYTHON"):
    from . import _pykernel as _impl
else:
    try:
        from . import _ckernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernel as _impl

BACKEND = _impl.BACKEND
integrate_path = _impl.integrate_path

SYS_JACOBI_CONST = 0
SYS_JACOBI_REVOLUTION = 1
SYS_GEODESIC_CC = 2
SYS_GEODESIC_REVOLUTION = 3

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_OVERFLOW = 2

__all__ = [
    "BACKEND", "integrate_path",
    "SYS_JACOBI_CONST", "SYS_JACOBI_REVOLUTION",
    "SYS_GEODESIC_CC", "SYS_GEODESIC_REVOLUTION",
    "STATUS_OK", "STATUS_UNDERFLOW", "STATUS_OVERFLOW",
]
