"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
implementation is used. Set ``PLD_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("PLD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

popcount = _impl.popcount
popcount_and = _impl.popcount_and
mask_indices = _impl.mask_indices
filter_scope = _impl.filter_scope
count_in_scope = _impl.count_in_scope
refine = _impl.refine


def backends():
    """Return the available backend modules keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _ckernels
        found["compiled"] = _ckernels
    except ImportError:
        pass
    return found
