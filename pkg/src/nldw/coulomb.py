"""Free-space Coulomb potentials on the grid and for radial profiles.

The 3-D potential ``u * |x|^-1`` is a discrete convolution evaluated by FFT on
a zero-padded ``2n`` cube, so no periodic images enter. The kernel is
``1/|x|`` at every non-zero lattice offset. Its value on the singular cell is
chosen so that the lattice sum of the kernel matches the continuum integral
(the regularized lattice constant from Ewald summation); that cancels the
``O(h^2)`` self-cell error of the plain midpoint rule. The attraction weights
``1/|x|`` get the same treatment on the eight cells touching the nucleus,
which sits on a cell corner.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.special import erfc

from . import kernels
from .fields import Grid3D, RadialProfile, ScalarField3D

__all__ = [
    "lattice_constant",
    "attraction_weights",
    "CoulombSolver",
    "NewtonBound",
    "newton_potential_radial",
    "newton_bound_check",
]


@functools.lru_cache(maxsize=4)
def lattice_constant(offset: float = 0.0, alpha: float = 2.0, cutoff: int = 6) -> float:
    r"""Regularized lattice sum of ``1/|n + c|`` over the unit cubic lattice.

    ``c = (offset, offset, offset)``. The value is
    ``lim_R (sum_{|n+c|<R}' 1/|n+c| - \int_{|x|<R} dx/|x|)``, from the Ewald
    split with a neutralizing background; it equals -2.8372975 for ``c = 0``.
    """
    k = np.arange(-cutoff, cutoff + 1, dtype=np.float64)
    n = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1).reshape(-1, 3)
    c = np.full(3, float(offset))
    d = np.linalg.norm(n + c, axis=1)
    keep = d > 1e-12
    real = np.sum(erfc(alpha * d[keep]) / d[keep])
    g = n[np.any(n != 0, axis=1)]
    g2 = np.sum(g * g, axis=1)
    recip = np.sum(np.exp(-(math.pi**2) * g2 / alpha**2) / g2 * np.cos(2 * math.pi * (g @ c))) / math.pi
    total = real + recip - math.pi / alpha**2
    if not keep.all():
        total -= 2.0 * alpha / math.sqrt(math.pi)
    return float(total)


@functools.lru_cache(maxsize=8)
def _attraction_weights(n, h):
    r = Grid3D(n, h).radius()
    w = 1.0 / r
    near = r < h
    w[near] -= lattice_constant(0.5) / (8.0 * h)
    w.flags.writeable = False
    return w


def attraction_weights(grid: Grid3D) -> np.ndarray:
    """Quadrature weights for ``1/|x|``: ``h^3 sum w f ~ \\int f/|x|``."""
    return _attraction_weights(grid.n, grid.h)


class CoulombSolver:
    """Free-space convolution with ``1/|x|`` on a fixed grid.

    Immutable after construction; the kernel transform is shared read-only
    and every call allocates its own scratch arrays.
    """

    def __init__(self, grid: Grid3D, workers: int | None = None):
        self.grid = grid
        self.workers = kernels.fft_workers() if workers is None else workers
        n2 = 2 * grid.n
        self.shape = (n2, n2, n2)
        self.self_weight = -lattice_constant(0.0) / grid.h
        i = np.arange(n2)
        off = np.minimum(i, n2 - i) * grid.h
        r = np.sqrt(off[:, None, None] ** 2 + off[None, :, None] ** 2 + off[None, None, :] ** 2)
        r[0, 0, 0] = 1.0
        kern = 1.0 / r
        kern[0, 0, 0] = self.self_weight
        kern *= grid.cell_volume
        self._kernel_hat = sfft.rfftn(kern, workers=self.workers)
        self._kernel_hat.flags.writeable = False

    def describe(self) -> dict:
        """Kernel parameters for run reports."""
        return {
            "n": self.grid.n,
            "h": self.grid.h,
            "padded_shape": list(self.shape),
            "self_weight_h": self.self_weight * self.grid.h,
            "lattice_constant": lattice_constant(0.0),
            "attraction_corner_constant": lattice_constant(0.5),
        }

    def _values(self, u):
        if isinstance(u, ScalarField3D):
            if u.grid != self.grid:
                raise ValueError(f"grid mismatch: solver {self.grid}, field {u.grid}")
            return u.values
        arr = np.asarray(u, dtype=np.float64)
        if arr.shape != (self.grid.n,) * 3:
            raise ValueError(f"array shape {arr.shape} does not match solver grid")
        return arr

    def potential_values(self, values) -> np.ndarray:
        """Potential as a bare array (no field wrapper)."""
        v = self._values(values)
        n = self.grid.n
        spec = sfft.rfftn(v, s=self.shape, workers=self.workers)
        spec *= self._kernel_hat
        out = sfft.irfftn(spec, s=self.shape, workers=self.workers)
        return np.ascontiguousarray(out[:n, :n, :n])

    def potential(self, u: ScalarField3D) -> ScalarField3D:
        """``u * |x|^-1`` sampled on the grid."""
        return ScalarField3D(self.grid, self.potential_values(u))

    def repulsion(self, f: ScalarField3D, g: ScalarField3D, phi_g=None) -> float:
        """``D(f, g) = 1/2 \\iint f(x) g(y) / |x - y|``."""
        fv = self._values(f)
        pg = self.potential_values(g) if phi_g is None else phi_g
        return 0.5 * self.grid.cell_volume * kernels.local_sums(fv, pg)[5]

    def self_repulsion(self, u: ScalarField3D) -> float:
        return self.repulsion(u, u)


# ------------------------------------------------------------------ radial


def _cumtrapz0(t, y):
    """Cumulative trapezoid from t=0 (integrand taken as 0 there)."""
    tt = np.concatenate(([0.0], t))
    yy = np.concatenate(([0.0], y))
    seg = 0.5 * np.diff(tt) * (yy[1:] + yy[:-1])
    return np.cumsum(seg)


def newton_potential_radial(p: RadialProfile, neg_tol: float = 1e-12) -> RadialProfile:
    """Potential of a radial density,
    ``4 pi/r int_0^r rho t^2 dt + 4 pi int_r^inf rho t dt``.

    Composite trapezoid on the profile radii, with the integrands vanishing at
    ``t = 0`` and the density taken as zero beyond the last radius.
    """
    if np.any(p.values < -neg_tol):
        raise ValueError("radial density has negative values")
    r, rho = p.r, p.values
    inner = _cumtrapz0(r, rho * r * r)
    outer_cum = _cumtrapz0(r, rho * r)
    outer = outer_cum[-1] - outer_cum
    return RadialProfile(r, 4.0 * math.pi * (inner / r + outer))


def radial_mass(p: RadialProfile) -> float:
    return 4.0 * math.pi * float(_cumtrapz0(p.r, p.values * p.r * p.r)[-1])


@dataclass(frozen=True)
class NewtonBound:
    """Largest excess of ``Phi(r)`` over ``m / r`` (clipped at 0) and the raw gap."""

    max_violation: float
    mass: float
    max_gap: float


def newton_bound_check(p: RadialProfile) -> NewtonBound:
    phi = newton_potential_radial(p)
    m = radial_mass(p)
    gap = float(np.max(phi.values - m / p.r))
    return NewtonBound(max_violation=max(0.0, gap), mass=m, max_gap=gap)
