"""Select the integration kernel at import time.

The compiled Cython extension is preferred; the pure-Python reference
implementation is the fallback. Set CHIRALQED_BACKEND=reference (or
=compiled) to force a choice, e.g. for benchmarking.
"""

from __future__ import annotations

import os

from . import _reference

_requested = os.environ.get("CHIRALQED_BACKEND", "").strip().lower()

if _requested not in ("", "compiled", "reference"):
    raise ImportError(
        f"CHIRALQED_BACKEND must be 'compiled' or 'reference', got {_requested!r}"
    )

if _requested == "reference":
    _impl = _reference
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _reference

BACKEND_NAME: str = _impl.BACKEND_NAME
integrate_fixed = _impl.integrate_fixed
sample_count = _impl.sample_count
