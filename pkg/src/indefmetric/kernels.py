"""Select the compiled kernel core when it is importable.

Set ``INDEFMETRIC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py
from ._kernels_py import basis_size, enumerate_states, multichoose

BACKEND = "python"
annihilation_entries = _kernels_py.annihilation_entries
rank_states = _kernels_py.rank_states

if not os.environ.get("INDEFMETRIC_PURE_PYTHON"):
    try:
        from ._ext import _kernels as _compiled
    except ImportError:
        pass
    else:
        annihilation_entries = _compiled.annihilation_entries
        rank_states = _compiled.rank_states
        BACKEND = "cython"

__all__ = [
    "BACKEND",
    "annihilation_entries",
    "basis_size",
    "enumerate_states",
    "multichoose",
    "rank_states",
]
