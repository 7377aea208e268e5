"""Select the kernel implementation at import time."""
import os

if os.environ.get("CAYLEYNET_PURE_PYTHON"):
    from . import _pykernels as kernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
