"""Backend selection for the propagation kernels.

The compiled extension is used when it was built; otherwise the NumPy
fallback is imported. Set ``RIEMANN_CDT_PURE_PYTHON=1`` to force the
fallback (the benchmark and the backend-agreement tests do this).
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("RIEMANN_CDT_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

step_product = _impl.step_product
apply_steps = _impl.apply_steps

__all__ = ["BACKEND", "step_product", "apply_steps"]
