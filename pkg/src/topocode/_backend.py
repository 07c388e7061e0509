"""Kernel backend selection.

The compiled extension is preferred; setting ``TOPOCODE_PURE_PYTHON=1``
forces the numpy fallback (used by the benchmark and the cross-check
tests).
"""
import os

from . import _purepy

purepy = _purepy

try:
    if os.environ.get("TOPOCODE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

kernels = compiled if compiled is not None else _purepy
BACKEND = "cython" if compiled is not None else "python"
