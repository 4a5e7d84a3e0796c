"""Select the kernel backend at import time.

``SHAPE_ALIGNER_BACKEND`` may be ``auto`` (default: compiled if built, else
Python), ``cython`` (fail if the extension is missing) or ``python``.
"""
import os

from . import _kernels_py


def _select():
    choice = os.environ.get("SHAPE_ALIGNER_BACKEND", "auto").lower()
    if choice not in ("auto", "cython", "python"):
        raise ImportError(f"unknown SHAPE_ALIGNER_BACKEND {choice!r}")
    if choice == "python":
        return _kernels_py
    try:
        from . import _kernels
    except ImportError:
        if choice == "cython":
            raise
        return _kernels_py
    return _kernels


kernels = _select()
BACKEND = kernels.NAME
