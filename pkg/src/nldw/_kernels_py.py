"""Pure numpy implementation of the grid kernels.

This is the reference backend; ``nldw._kernels`` (Cython) must agree with it
to within the reduction tolerance documented in :mod:`nldw.kernels`.
"""

import numpy as np

BACKEND = "python"

_C1 = 1.0 / 24.0
_C27 = 27.0 / 24.0


def _sl(axis, start, stop):
    idx = [slice(None)] * 3
    idx[axis] = slice(start, stop)
    return tuple(idx)


def _face_diffs(u, h, axis):
    """Differences on the n-1 interior faces along ``axis``.

    Faces whose 4-point stencil fits inside the box use the staggered
    fourth-order formula; the two outermost faces fall back to the
    two-point difference.
    """
    n = u.shape[axis]
    shape = list(u.shape)
    shape[axis] = n - 1
    d = np.empty(shape)
    # written in differences so that constants give exactly zero
    d[_sl(axis, 1, n - 2)] = (
        _C27 * (u[_sl(axis, 2, n - 1)] - u[_sl(axis, 1, n - 2)])
        - _C1 * (u[_sl(axis, 3, n)] - u[_sl(axis, 0, n - 3)])
    ) / h
    d[_sl(axis, 0, 1)] = (u[_sl(axis, 1, 2)] - u[_sl(axis, 0, 1)]) / h
    d[_sl(axis, n - 2, n - 1)] = (u[_sl(axis, n - 1, n)] - u[_sl(axis, n - 2, n - 1)]) / h
    return d


def _face_diffs_adjoint(d, h, axis, out):
    n = d.shape[axis] + 1
    m = d[_sl(axis, 1, n - 2)] / h
    out[_sl(axis, 0, n - 3)] += _C1 * m
    out[_sl(axis, 1, n - 2)] -= _C27 * m
    out[_sl(axis, 2, n - 1)] += _C27 * m
    out[_sl(axis, 3, n)] -= _C1 * m
    b = d[_sl(axis, 0, 1)] / h
    out[_sl(axis, 1, 2)] += b
    out[_sl(axis, 0, 1)] -= b
    b = d[_sl(axis, n - 2, n - 1)] / h
    out[_sl(axis, n - 1, n)] += b
    out[_sl(axis, n - 2, n - 1)] -= b


def face_sumsq(u, h):
    """Sum over all faces and axes of the squared face difference."""
    u = np.asarray(u, dtype=np.float64)
    return float(sum(np.sum(_face_diffs(u, h, a) ** 2) for a in range(3)))


def face_gradient(u, h):
    """Return ``(sumsq, DtD u)`` where D is the face-difference operator."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    total = 0.0
    for a in range(3):
        d = _face_diffs(u, h, a)
        total += float(np.sum(d * d))
        _face_diffs_adjoint(d, h, a, out)
    return total, out


def local_sums(u, w):
    """Reductions used by the local energy terms.

    Returns ``(sum u, sum u^2, sum u^3, sum u^4, sum u^2 (1-u)^2, sum w u)``.
    """
    u = np.asarray(u, dtype=np.float64)
    u2 = u * u
    return (
        float(np.sum(u)),
        float(np.sum(u2)),
        float(np.sum(u2 * u)),
        float(np.sum(u2 * u2)),
        float(np.sum(u2 * (1.0 - u) ** 2)),
        float(np.sum(np.asarray(w) * u)),
    )


def shift_clip_sum(u, mu):
    """Return ``(sum max(u - mu, 0), #{u > mu})``."""
    v = np.asarray(u, dtype=np.float64) - mu
    pos = v > 0.0
    return float(np.sum(v[pos])), int(np.count_nonzero(pos))


def find_shift(u, target, tol=1e-12, max_iter=400):
    """Solve ``sum max(u - mu, 0) = target`` for mu by bisection.

    The bracket is shrunk until its width is below ``tol`` (relative to the
    largest bracket endpoint, floor 1); the shift is then recomputed in closed
    form on the resulting active set so the clipped sum hits ``target`` to
    rounding. Entries at or below the lower bracket are dropped as it rises.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    if not target > 0.0:
        raise ValueError("target sum must be positive")
    hi = float(u.max())
    lo = float(u.min()) - target / u.size
    f_lo, _ = shift_clip_sum(u, lo)
    if f_lo < target:
        raise ArithmeticError("shift bisection does not bracket the target")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        f_mid, _ = shift_clip_sum(u, mid)
        if f_mid > target:
            lo = mid
            u = u[u > lo]
        else:
            hi = mid
    act = u > lo
    return (float(np.sum(u[act])) - target) / int(np.count_nonzero(act))
