"""Select the kernel implementation at import time.

The compiled extension is preferred. Setting ``AWTSTAT_PURE_PYTHON=1`` in
the environment forces the NumPy fallback, which is also used when the
extension was not built.
"""
import os

from . import _pykernels

kernels = _pykernels
BACKEND = "python"

if os.environ.get("AWTSTAT_PURE_PYTHON", "") != "1":
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"
