"""Eigensolver kernel with backend selection at import time.

The compiled Cython kernel is preferred; the pure numpy implementation is the
fallback. Set OPALG_PURE=1 to force the fallback (used by the parity tests and
the benchmark).
"""

import os

from . import jacobi_pure

if os.environ.get("OPALG_PURE") == "1":
    _impl = jacobi_pure
    BACKEND = "pure"
else:
    try:
        from . import _jacobi as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = jacobi_pure
        BACKEND = "pure"

hermitian_eigh = _impl.hermitian_eigh


def backend_name() -> str:
    return BACKEND
