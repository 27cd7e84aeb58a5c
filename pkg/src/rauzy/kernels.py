"""Backend selection for the bulk word kernels.

The compiled extension is used when importable; set ``RAUZY_KERNELS=python``
to force the interpreted implementation.
"""

from __future__ import annotations

import os

from rauzy import _pykernels

if os.environ.get("RAUZY_KERNELS", "").lower() == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from rauzy import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

word_matrices = _impl.word_matrices
level_matrices = _impl.level_matrices
vertex_max = _impl.vertex_max
leading_runs = _impl.leading_runs
classify_level = _impl.classify_level
successor_table = _impl.successor_table
state_codes = _impl.state_codes

__all__ = [
    "BACKEND",
    "word_matrices",
    "level_matrices",
    "vertex_max",
    "leading_runs",
    "classify_level",
    "successor_table",
    "state_codes",
]
