"""Backend selection for the float64 kernels.

The compiled module is used when it imports; setting ``OBSROUTE_PURE=1``
forces the pure Python fallback (used by the backend-agreement tests and the
benchmark).
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("OBSROUTE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

sees_batch = _impl.sees_batch
sees_point = _impl.sees_point
points_in_rings = _impl.points_in_rings
dist_to_segments = _impl.dist_to_segments
gtsp_held_karp = _impl.gtsp_held_karp


def backend(name: str):
    """Return the kernel module for ``name`` in {"python", "cython"}."""
    if name == "python":
        return _kernels_py
    from . import _kernels  # type: ignore[attr-defined]
    return _kernels
