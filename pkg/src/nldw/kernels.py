"""Backend selection for the grid kernels.

The compiled extension ``nldw._kernels`` is used when it imports; otherwise
the numpy implementation in ``nldw._kernels_py`` is used. Setting
``NLDW_PURE_PYTHON=1`` forces the fallback. Both backends agree to 1e-13
relative on every reduction.
"""

import os

from . import _kernels_py

if os.environ.get("NLDW_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

face_sumsq = _impl.face_sumsq
face_gradient = _impl.face_gradient
local_sums = _impl.local_sums
shift_clip_sum = _impl.shift_clip_sum
find_shift = _impl.find_shift


def backends():
    """Return the importable backend modules keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found


def fft_workers():
    """Worker count for scipy.fft, capped by ``NLDW_THREADS`` (default 1)."""
    raw = os.environ.get("NLDW_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"NLDW_THREADS must be an integer, got {raw!r}") from None
