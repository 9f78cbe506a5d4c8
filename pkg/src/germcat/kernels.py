"""Kernel backend selection.

The compiled extension is used when importable; set ``GERMCAT_PURE_PYTHON=1``
to force the reference implementation.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GERMCAT_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
enumerate_cones = _impl.enumerate_cones
count_cones = _impl.count_cones
first_assoc_violation = _impl.first_assoc_violation
first_lifting_failure = _impl.first_lifting_failure
enumerate_simplicial_maps = _impl.enumerate_simplicial_maps

__all__ = [
    "BACKEND",
    "count_cones",
    "enumerate_cones",
    "enumerate_simplicial_maps",
    "first_assoc_violation",
    "first_lifting_failure",
]
