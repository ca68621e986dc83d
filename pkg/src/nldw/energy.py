"""Term-by-term evaluation of the energy and its first variation.

    E_Z(u) = 1/2 \\int |grad u|^2 + 1/2 \\int u^2 (1 - u)^2 - Z \\int u/|x| + D(u)

The gradient term sums squared face differences (fourth-order staggered
stencil, two-point on the outermost faces). The Laplacian used in the first
variation is minus the adjoint of that difference operator, so directional
derivatives of the discrete energy match ``<first_variation, phi>`` exactly
for the quadratic part.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .coulomb import CoulombSolver, attraction_weights
from .fields import ScalarField3D, dilate

__all__ = [
    "EnergyBreakdown",
    "gradient_energy",
    "laplacian",
    "double_well",
    "attraction",
    "total_energy",
    "first_variation",
    "evaluate",
    "sigma_scaling",
    "dilation_energy_limit",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    gradient: float
    double_well: float
    attraction: float
    coulomb: float

    @property
    def total(self) -> float:
        return self.gradient + self.double_well + self.attraction + self.coulomb

    @property
    def scale(self) -> float:
        """Sum of absolute term values; the natural size for relative errors."""
        return abs(self.gradient) + abs(self.double_well) + abs(self.attraction) + abs(self.coulomb)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    @classmethod
    def zero(cls) -> EnergyBreakdown:
        return cls(0.0, 0.0, 0.0, 0.0)


def gradient_energy(u: ScalarField3D) -> float:
    g = u.grid
    return 0.5 * g.cell_volume * kernels.face_sumsq(u.values, g.h)


def laplacian(u: ScalarField3D) -> ScalarField3D:
    """Discrete Laplacian, adjoint-consistent with :func:`gradient_energy`."""
    _, dtd = kernels.face_gradient(u.values, u.grid.h)
    return ScalarField3D(u.grid, -dtd)


def double_well(u: ScalarField3D) -> float:
    return 0.5 * u.grid.cell_volume * kernels.local_sums(u.values, u.values)[4]


def attraction(u: ScalarField3D, Z: float) -> float:
    """Signed attraction term ``-Z \\int u / |x|``."""
    if not Z >= 0:
        raise ValueError("Z must be >= 0")
    if Z == 0:
        return 0.0
    w = attraction_weights(u.grid)
    return -Z * u.grid.cell_volume * kernels.local_sums(u.values, w)[5]


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Energy plus the arrays the flow reuses (potential, first variation)."""

    energy: EnergyBreakdown
    phi: np.ndarray
    fv: np.ndarray | None
    sums: tuple


def evaluate(values: np.ndarray, Z: float, solver: CoulombSolver, with_variation=True, phi=None) -> Evaluation:
    """Energy of a bare value array; optionally its first variation.

    ``phi`` may carry an already computed potential of ``values``.
    """
    g = solver.grid
    vol = g.cell_volume
    w = attraction_weights(g)
    if phi is None:
        phi = solver.potential_values(values)
    sums = kernels.local_sums(values, w)
    if with_variation:
        sq, dtd = kernels.face_gradient(values, g.h)
    else:
        sq, dtd = kernels.face_sumsq(values, g.h), None
    coul = 0.5 * vol * kernels.local_sums(values, phi)[5]
    e = EnergyBreakdown(
        gradient=0.5 * vol * sq,
        double_well=0.5 * vol * sums[4],
        attraction=-Z * vol * sums[5],
        coulomb=coul,
    )
    fv = None
    if with_variation:
        u = values
        fv = dtd + u * (1.0 + u * (-3.0 + 2.0 * u)) - Z * w + phi
    return Evaluation(e, phi, fv, sums)


def total_energy(u: ScalarField3D, Z: float, solver: CoulombSolver) -> EnergyBreakdown:
    if not Z >= 0:
        raise ValueError("Z must be >= 0")
    if u.grid != solver.grid:
        raise ValueError("field and solver grids differ")
    return evaluate(u.values, Z, solver, with_variation=False).energy


def first_variation(u: ScalarField3D, Z: float, solver: CoulombSolver) -> ScalarField3D:
    """``-Lap u + u - 3u^2 + 2u^3 - Z/|x| + u * |x|^-1`` on the grid.

    With the inner product ``h^3 sum(a * b)`` this is the gradient of the
    discrete energy.
    """
    if u.grid != solver.grid:
        raise ValueError("field and solver grids differ")
    return ScalarField3D(u.grid, evaluate(u.values, Z, solver).fv)


def sigma_scaling(u: ScalarField3D, Z: float, sigma: float, solver: CoulombSolver) -> float:
    """``E_Z(sigma u)`` from the moments of ``u``:

    ``-sigma A + sigma^2 [G + 1/2 (S2 - 2 sigma S3 + sigma^2 S4) + D]``
    with ``A = Z \\int u/|x|``, ``G = 1/2 \\int |grad u|^2``, ``S_k = \\int u^k``.
    """
    if not sigma >= 0:
        raise ValueError("sigma must be >= 0")
    ev = evaluate(u.values, Z, solver, with_variation=False)
    vol = u.grid.cell_volume
    _, s2, s3, s4, _, sw = ev.sums
    a = Z * vol * sw
    well = 0.5 * vol * (s2 - 2.0 * sigma * s3 + sigma**2 * s4)
    return -sigma * a + sigma**2 * (ev.energy.gradient + well + ev.energy.coulomb)


def dilation_energy_limit(u: ScalarField3D, sigmas, solver: CoulombSolver, order: int = 1) -> list[tuple[float, float]]:
    """``(sigma, E_0(sigma^3 u(sigma .)))`` for each sigma (nucleus switched off)."""
    sig = [float(s) for s in sigmas]
    if any(b >= a for a, b in zip(sig, sig[1:])):
        raise ValueError("sigma list must be strictly decreasing")
    return [(s, total_energy(dilate(u, s, order=order), 0.0, solver).total) for s in sig]
