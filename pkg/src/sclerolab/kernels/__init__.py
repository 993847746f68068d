"""Pointwise per-step kernels with a compiled core and a NumPy fallback.

The compiled extension (_speedups, Cython) is preferred; set
SCLEROLAB_PURE_PYTHON=1 to force the NumPy reference implementation.
BACKEND names the active choice ("compiled" or "python").
"""

from __future__ import annotations

import os

if os.environ.get("SCLEROLAB_PURE_PYTHON"):
    from . import _reference as _impl

    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _reference as _impl

        BACKEND = "python"

saturating_stage = _impl.saturating_stage
combine_fields = _impl.combine_fields
field_minmax = _impl.field_minmax

__all__ = ["BACKEND", "saturating_stage", "combine_fields", "field_minmax"]
