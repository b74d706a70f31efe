"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the fallback
and the semantic reference. FIBCAT_PURE=1 forces the fallback for a whole
process; the agreement tests and the benchmark instead import both modules
directly and compare them side by side.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("FIBCAT_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

assoc_violation = _impl.assoc_violation
cocart_flags = _impl.cocart_flags
cart_flags = _impl.cart_flags
