"""Grid geometry, sampled fields, and the basic field operations.

The grid is cell centered: sample ``i`` along each axis sits at
``(i - n/2 + 1/2) h``, so the origin is a cell corner and no sample lands on
the nucleus. Integrals are midpoint sums ``h^3 * sum(values)``.
"""

from __future__ import annotations

import functools
import math
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.integrate import lebedev_rule

from . import kernels

__all__ = [
    "Grid3D",
    "ScalarField3D",
    "RadialProfile",
    "ModelParams",
    "CheckpointError",
    "mass",
    "lp_norm",
    "spherical_average",
    "mass_shift",
    "project_mass_nonneg",
    "dilate",
    "two_cluster",
    "outer_mass_fraction",
    "gaussian",
    "uniform_ball",
    "smooth_bump",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class Grid3D:
    """Uniform cubic grid of ``n`` cells per axis with spacing ``h``."""

    n: int
    h: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise TypeError("n must be an integer")
        if self.n < 8 or self.n % 2:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"h must be positive, got {self.h}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", float(self.h))

    @classmethod
    def from_extent(cls, n: int, L: float) -> Grid3D:
        return cls(n, L / n)

    @property
    def L(self) -> float:
        return self.n * self.h

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def inradius(self) -> float:
        """Radius of the largest origin-centred sphere inside the sample hull."""
        return 0.5 * self.L - 0.5 * self.h

    @property
    def half_diagonal(self) -> float:
        return math.sqrt(3.0) * 0.5 * self.L

    def axis(self) -> np.ndarray:
        return _axis(self.n, self.h)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _coords(self.n, self.h)

    def radius(self) -> np.ndarray:
        """|x| at every sample (read-only, cached per grid)."""
        return _radius(self.n, self.h)

    def to_index(self, points: np.ndarray) -> np.ndarray:
        """Fractional array indices of physical points, shape (3, ...)."""
        return np.asarray(points) / self.h + (0.5 * self.n - 0.5)


@functools.lru_cache(maxsize=8)
def _axis(n, h):
    a = (np.arange(n) - 0.5 * n + 0.5) * h
    a.flags.writeable = False
    return a


@functools.lru_cache(maxsize=8)
def _coords(n, h):
    a = _axis(n, h)
    out = tuple(np.broadcast_to(a.reshape(s), (n, n, n)) for s in ((n, 1, 1), (1, n, 1), (1, 1, n)))
    return out


@functools.lru_cache(maxsize=8)
def _radius(n, h):
    a = _axis(n, h)
    r = np.sqrt(a[:, None, None] ** 2 + a[None, :, None] ** 2 + a[None, None, :] ** 2)
    r.flags.writeable = False
    return r


@dataclass(frozen=True, eq=False)
class ScalarField3D:
    """Real samples of a field on a :class:`Grid3D`.

    ``values`` is stored as a read-only C-ordered ``(n, n, n)`` array; a flat
    array of length ``n**3`` is accepted and reshaped row-major. ``notes`` holds
    warnings attached by the operation that produced the field.
    """

    grid: Grid3D
    values: np.ndarray
    nonneg: bool = False
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = self.grid.n
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if v.size != n**3:
            raise ValueError(f"expected {n**3} values for n={n}, got {v.size}")
        v = v.reshape(n, n, n)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        if self.nonneg and v.min() < 0.0:
            raise ValueError("field flagged nonneg has negative values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def with_values(self, values, nonneg=False, notes=()):
        return ScalarField3D(self.grid, values, nonneg=nonneg, notes=tuple(notes))

    def __mul__(self, c):
        c = float(c)
        return ScalarField3D(self.grid, c * self.values, nonneg=self.nonneg and c >= 0)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_grid(self, other)
        return ScalarField3D(self.grid, self.values + other.values, nonneg=self.nonneg and other.nonneg)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return ScalarField3D(self.grid, self.values - other.values)

    def __neg__(self):
        return ScalarField3D(self.grid, -self.values)

    def abs(self) -> ScalarField3D:
        return ScalarField3D(self.grid, np.abs(self.values), nonneg=True)

    @classmethod
    def zeros(cls, grid: Grid3D) -> ScalarField3D:
        return cls(grid, np.zeros((grid.n,) * 3), nonneg=True)

    @classmethod
    def constant(cls, grid: Grid3D, c: float) -> ScalarField3D:
        return cls(grid, np.full((grid.n,) * 3, float(c)), nonneg=c >= 0)

    @classmethod
    def from_function(cls, grid: Grid3D, fn, nonneg=False) -> ScalarField3D:
        X, Y, Z = grid.coords()
        return cls(grid, np.broadcast_to(fn(X, Y, Z), (grid.n,) * 3), nonneg=nonneg)


def _check_same_grid(a: ScalarField3D, b: ScalarField3D):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples ``values[k] = f(r[k])`` of a radial function."""

    r: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=np.float64)
        v = np.array(self.values, dtype=np.float64)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("radii and values must be 1-D arrays of equal length >= 2")
        if not r[0] > 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("radial profile must be finite")
        r.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, r, fn) -> RadialProfile:
        r = np.asarray(r, dtype=np.float64)
        return cls(r, fn(r))


@dataclass(frozen=True)
class ModelParams:
    """Problem data and solver knobs for one constrained minimization."""

    Z: float
    M: float
    grid: Grid3D
    tol_grad: float = 1e-5
    tol_mass: float = 1e-10
    max_iters: int = 3000
    tau0: float = 1e-2
    escape_radius_fraction: float = 0.8
    tau_min: float = 1e-12
    tau_max: float = 10.0
    escape_threshold: float = 0.5
    escape_window: int = 50

    def __post_init__(self):
        if not self.Z >= 0:
            raise ValueError(f"Z must be >= 0, got {self.Z}")
        if not self.M > 0:
            raise ValueError(f"M must be > 0, got {self.M}")
        for name in ("tol_grad", "tol_mass", "tau0", "tau_min", "tau_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.escape_radius_fraction < 1:
            raise ValueError("escape_radius_fraction must lie in (0, 1)")
        if self.max_iters < 0 or self.escape_window < 1:
            raise ValueError("max_iters must be >= 0 and escape_window >= 1")

    @property
    def u_floor(self) -> float:
        return 1e-8 * self.M / self.grid.L**3

    @property
    def escape_radius(self) -> float:
        return self.escape_radius_fraction * 0.5 * self.grid.L


# ---------------------------------------------------------------- reductions


def mass(u: ScalarField3D) -> float:
    """Signed integral ``h^3 sum(values)``."""
    return u.grid.cell_volume * kernels.local_sums(u.values, u.values)[0]


def lp_norm(u: ScalarField3D, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(u.values)
    if p == 1:
        s = np.sum(a)
    elif p == 2:
        s = kernels.local_sums(u.values, u.values)[1]
    else:
        s = np.sum(a**p)
    return float((u.grid.cell_volume * s) ** (1.0 / p))


# ---------------------------------------------------------- spherical means


@functools.lru_cache(maxsize=4)
def _angular_design(degree):
    nodes, weights = lebedev_rule(degree)
    if nodes.shape[1] < 110:
        raise ValueError(f"angular design of degree {degree} has fewer than 110 nodes")
    return nodes, weights / weights.sum()


def spherical_average(u: ScalarField3D, radii, *, order: int = 5, degree: int = 17) -> RadialProfile:
    """Average of ``u`` over spheres ``|x| = r`` centred at the origin.

    Angular quadrature is a Lebedev rule of the given degree (degree 17 has
    110 nodes); off-grid values come from a spline interpolant of ``order``
    (1 is trilinear).
    """
    r = np.asarray(radii.r if isinstance(radii, RadialProfile) else radii, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("radii must be a non-empty 1-D array")
    g = u.grid
    if r.max() > g.inradius:
        raise ValueError(f"radius {r.max():.6g} exceeds the grid inradius {g.inradius:.6g}")
    nodes, weights = _angular_design(degree)
    pts = r[None, :, None] * nodes[:, None, :]
    idx = g.to_index(pts.reshape(3, -1))
    if order > 1:
        coeffs = ndimage.spline_filter(u.values, order=order, mode="mirror")
        vals = ndimage.map_coordinates(coeffs, idx, order=order, prefilter=False, mode="mirror")
    else:
        vals = ndimage.map_coordinates(u.values, idx, order=1, mode="nearest")
    avg = vals.reshape(r.size, -1) @ weights
    return RadialProfile(r, avg)


# --------------------------------------------------------------- projection


def mass_shift(u: ScalarField3D, M: float, tol: float = 1e-12) -> float:
    """The shift ``mu`` with ``h^3 sum max(u - mu, 0) = M``."""
    if not M > 0:
        raise ValueError(f"M must be > 0, got {M}")
    return kernels.find_shift(u.values, M / u.grid.cell_volume, tol)


def project_mass_nonneg(u: ScalarField3D, M: float, tol: float = 1e-12) -> ScalarField3D:
    """L2-orthogonal projection onto ``{v >= 0, h^3 sum v = M}``."""
    mu = mass_shift(u, M, tol)
    return ScalarField3D(u.grid, np.maximum(u.values - mu, 0.0), nonneg=True)


# ----------------------------------------------------------- trial states


def dilate(u: ScalarField3D, sigma: float, *, order: int = 1, max_loss: float = 1e-6) -> ScalarField3D:
    """Mass-preserving dilation ``sigma^3 u(sigma x)``, resampled on the same grid.

    Raises ``ValueError`` when more than ``max_loss`` of the absolute mass
    would be pushed outside the box (only possible for ``sigma < 1``).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    g = u.grid
    if sigma == 1.0:
        return u
    if sigma < 1.0:
        X, Y, Z = g.coords()
        edge = sigma * g.inradius
        outside = (np.abs(X) > edge) | (np.abs(Y) > edge) | (np.abs(Z) > edge)
        total = np.sum(np.abs(u.values))
        lost = np.sum(np.abs(u.values[outside]))
        if total > 0 and lost > max_loss * total:
            raise ValueError(
                f"dilation by sigma={sigma} pushes {lost / total:.3g} of the mass out of the box"
            )
    a = g.axis() * sigma
    idx = np.stack(np.meshgrid(a, a, a, indexing="ij")) / g.h + (0.5 * g.n - 0.5)
    vals = ndimage.map_coordinates(u.values, idx.reshape(3, -1), order=order, mode="constant", cval=0.0)
    vals = sigma**3 * vals.reshape((g.n,) * 3)
    if u.nonneg:
        vals = np.maximum(vals, 0.0)
    return ScalarField3D(g, vals, nonneg=u.nonneg)


def _translate(u: ScalarField3D, offset) -> np.ndarray:
    g = u.grid
    off = np.asarray(offset, dtype=np.float64)
    if off.shape != (3,):
        raise ValueError("offset must be a 3-vector")
    steps = off / g.h
    if np.allclose(steps, np.round(steps), atol=1e-9):
        k = np.round(steps).astype(int)
        out = np.zeros_like(u.values)
        src = [slice(max(0, -s), g.n - max(0, s)) for s in k]
        dst = [slice(max(0, s), g.n - max(0, -s)) for s in k]
        out[tuple(dst)] = u.values[tuple(src)]
        return out
    return ndimage.shift(u.values, steps, order=1, mode="constant", cval=0.0)


def two_cluster(u1: ScalarField3D, u2: ScalarField3D, offset, *, overlap_tol: float = 1e-8) -> ScalarField3D:
    """``u1(x) + u2(x - offset)``: the second cluster moved by ``offset``.

    The sum carries a note (and a ``RuntimeWarning`` is issued) when the
    overlap integral ``h^3 sum u1 * u2(. - offset)`` exceeds
    ``overlap_tol * min(m1, m2)``.
    """
    _check_same_grid(u1, u2)
    g = u1.grid
    shifted = _translate(u2, offset)
    m2 = mass(u2.abs())
    kept = g.cell_volume * float(np.sum(np.abs(shifted)))
    if m2 > 0 and abs(kept - m2) > 1e-6 * m2:
        raise ValueError("shifted second cluster leaves the box")
    m1 = mass(u1.abs())
    overlap = g.cell_volume * float(np.sum(np.abs(u1.values * shifted)))
    notes = ()
    if overlap > overlap_tol * min(m1, m2):
        msg = f"cluster overlap {overlap:.3e} exceeds {overlap_tol:g} * min mass"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes = (msg,)
    return ScalarField3D(g, u1.values + shifted, nonneg=u1.nonneg and u2.nonneg, notes=notes)


def outer_mass_fraction(u: ScalarField3D, r: float) -> float:
    """Fraction of the mass of ``u`` lying in ``{|x| >= r}``."""
    total = float(np.sum(u.values))
    if total <= 0:
        raise ValueError("outer mass fraction needs positive total mass")
    outer = float(np.sum(u.values[u.grid.radius() >= r]))
    return outer / total


# ------------------------------------------------------------ constructors


def _r_from(grid, center):
    X, Y, Z = grid.coords()
    cx, cy, cz = (0.0, 0.0, 0.0) if center is None else center
    return np.sqrt((X - cx) ** 2 + (Y - cy) ** 2 + (Z - cz) ** 2)


def gaussian(grid: Grid3D, amplitude=1.0, width=1.0, center=None, mass_target=None) -> ScalarField3D:
    """``amplitude * exp(-|x - center|^2 / width^2)``, optionally rescaled to a mass."""
    vals = amplitude * np.exp(-(_r_from(grid, center) ** 2) / width**2)
    f = ScalarField3D(grid, vals, nonneg=amplitude >= 0)
    if mass_target is not None:
        f = f * (mass_target / mass(f))
    return f


def uniform_ball(grid: Grid3D, radius, value=None, center=None, mass_target=None) -> ScalarField3D:
    """Indicator of a ball (voxelized) scaled to a value or a total mass."""
    ind = (_r_from(grid, center) <= radius).astype(np.float64)
    if not ind.any():
        raise ValueError("ball contains no grid points")
    if mass_target is not None:
        ind *= mass_target / (grid.cell_volume * ind.sum())
    elif value is not None:
        ind *= value
    return ScalarField3D(grid, ind, nonneg=True)


def smooth_bump(grid: Grid3D, radius, center=None, amplitude=1.0, mass_target=None) -> ScalarField3D:
    """Compactly supported ``exp(1 - 1/(1 - (r/a)^2))`` bump of radius ``a``."""
    t = _r_from(grid, center) / radius
    vals = np.zeros_like(t)
    inside = t < 1.0
    vals[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    if not inside.any():
        raise ValueError("bump contains no grid points")
    f = ScalarField3D(grid, amplitude * vals, nonneg=amplitude >= 0)
    if mass_target is not None:
        f = f * (mass_target / mass(f))
    return f


# -------------------------------------------------------------- checkpoints

MAGIC = b"NLDW"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIId")


class CheckpointError(ValueError):
    """Malformed or unsupported field checkpoint."""


def save_field(path, u: ScalarField3D) -> None:
    """Write ``u`` as magic, version, n, h, then n^3 little-endian doubles."""
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, u.grid.n, u.grid.h)
    Path(path).write_bytes(header + u.values.astype("<f8").tobytes(order="C"))


def load_field(path, nonneg=None) -> ScalarField3D:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header")
    magic, version, n, h = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + 8 * n**3
    if len(data) != expected:
        raise CheckpointError(f"{path}: expected {expected} bytes, found {len(data)}")
    try:
        grid = Grid3D(n, h)
        vals = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(n, n, n)
        if nonneg is None:
            nonneg = bool(vals.min() >= 0.0)
        return ScalarField3D(grid, vals, nonneg=nonneg)
    except (ValueError, TypeError) as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
