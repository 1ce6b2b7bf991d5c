"""Hot numerical kernels with a compiled core and a NumPy fallback.

The compiled module (``depthbench._kernels._native``) implements exact
nearest-neighbour queries, the exact squared Euclidean distance transform
and bilinear gathering. The NumPy fallback implements the same operations
with identical floating point semantics, so both backends return
bit-identical results. Selection happens once at import time; set
``DEPTHBENCH_FORCE_PYTHON=1`` to force the fallback.
"""

import importlib
import os

from . import _fallback

_native = None
BACKEND = "python"
if os.environ.get("DEPTHBENCH_FORCE_PYTHON", "").strip() in ("", "0"):
    try:
        _native = importlib.import_module(__name__ + "._native")
        BACKEND = "native"
    except ImportError:
        _native = None

if _native is not None:
    build_nn_index = _native.KDTree
    edt_squared = _native.edt_squared
    bilinear_gather = _native.bilinear_gather
else:
    build_nn_index = _fallback.BruteForceIndex
    edt_squared = _fallback.edt_squared
    bilinear_gather = _fallback.bilinear_gather

__all__ = ["BACKEND", "build_nn_index", "edt_squared", "bilinear_gather", "_fallback"]
