"""Selects the compiled kernels when available, the pure-Python ones otherwise.

Set ``MOEAD_AMR_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

python_kernels: ModuleType = _pykernels
compiled_kernels: ModuleType | None
try:
    from . import _kernels as compiled_kernels
except ImportError:
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("MOEAD_AMR_PURE_PYTHON", "") in ("", "0"):
    kernels: ModuleType = compiled_kernels
    BACKEND = "cython"
else:
    kernels = _pykernels
    BACKEND = "python"

PROBLEM_IDS = _pykernels.PROBLEM_IDS
MODES = _pykernels.MODES
