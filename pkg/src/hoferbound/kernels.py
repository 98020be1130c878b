"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``HOFERBOUND_KERNEL=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

__all__ = ["BACKEND", "reduce_pairs", "search_min_depth", "MAX_COMPILED"]

MAX_COMPILED = 64

_compiled = None
if os.environ.get("HOFERBOUND_KERNEL", "").lower() != "python":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def reduce_pairs(cols):
    if _compiled is not None and len(cols) <= MAX_COMPILED:
        return _compiled.reduce_pairs(cols)
    return _kernels_py.reduce_pairs(cols)


def search_min_depth(filt, grade, rows):
    if _compiled is not None and len(filt) <= MAX_COMPILED:
        return _compiled.search_min_depth(filt, grade, rows)
    return _kernels_py.search_min_depth(filt, grade, rows)
