"""Pick the kernel implementation at import time.

The compiled extension is preferred; set ``HDSLICE_PURE_PYTHON=1`` to force
the reference implementation.
"""
import os

from . import _kernels_py

if os.environ.get("HDSLICE_PURE_PYTHON"):
    kernels = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as kernels
        COMPILED = True
    except ImportError:  # extension not built
        kernels = _kernels_py
        COMPILED = False

BACKENDS = {"python": _kernels_py}
if COMPILED:
    BACKENDS["compiled"] = kernels
