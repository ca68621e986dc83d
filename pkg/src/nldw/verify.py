"""Numerical certificates for the analytic estimates on concrete fields.

Every check returns :class:`InequalityReport` objects with ``lhs <= rhs`` as
the claim. Checks with fully explicit constants are *hard* (pass/fail).
Checks whose constant is a free universal ``C`` compute the smallest constant
``C*`` that makes the inequality hold on the given field, and compare it with
a cap taken from the committed reference run.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .coulomb import CoulombSolver, attraction_weights, newton_potential_radial, radial_mass
from .energy import EnergyBreakdown, evaluate, total_energy
from .fields import Grid3D, RadialProfile, ScalarField3D, mass

__all__ = [
    "InequalityReport",
    "CurveReport",
    "PartitionSpec",
    "digest",
    "check_abs_comparison",
    "check_coercivity",
    "check_l3_interpolation",
    "check_mass_bounds",
    "check_improved_mass_bounds",
    "check_ims_split",
    "outer_mass_certificate",
    "screened_tail",
    "nonexistence_rhs",
    "optimal_s",
    "nonexistence_threshold",
    "check_el_inequality",
    "check_el_raw",
    "el_fixture_charge",
    "check_I_curve",
    "radial_tail_limit",
    "reports_to_json",
    "reports_table",
]


def _tol(rhs: float) -> float:
    return 1e-8 * (1.0 + abs(rhs))


def digest(*parts) -> str:
    """SHA-256 over field bytes and ``repr`` of scalar inputs."""
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, ScalarField3D):
            h.update(np.ascontiguousarray(p.values).tobytes())
            h.update(repr((p.grid.n, p.grid.h)).encode())
        elif isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p).tobytes())
        else:
            h.update(repr(p).encode())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class InequalityReport:
    """Claim ``lhs <= rhs``; ``passed`` iff ``rhs - lhs >= -1e-8 (1 + |rhs|)``."""

    name: str
    lhs: float
    rhs: float
    digest: str
    hard: bool = True
    c_star: float | None = None
    c_cap: float | None = None
    skipped: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return self.margin >= -_tol(self.rhs)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        d["passed"] = self.passed
        return d

    @classmethod
    def skip(cls, name, reason, hard=True):
        return cls(name, math.nan, math.nan, "", hard=hard, skipped=True, detail={"reason": reason})


def _free(name, coercive, base, denom, cap, dig, detail=None):
    """Report for ``coercive <= base + C denom`` with ``C*`` and a cap."""
    detail = dict(detail or {})
    detail["denominator"] = denom
    if denom > 0:
        cstar = (coercive - base) / denom
    else:
        cstar = -math.inf if coercive <= base else math.inf
    c = cap if cap is not None else max(cstar, 0.0)
    rhs = base + c * denom if denom > 0 else base
    return InequalityReport(name, coercive, rhs, dig, hard=False, c_star=cstar, c_cap=cap, detail=detail)


# ------------------------------------------------------------ sign checks


def check_abs_comparison(u: ScalarField3D, Z: float, solver: CoulombSolver) -> InequalityReport:
    """``E_Z(|u|) <= E_Z(u)`` for signed ``u`` with L1 norm at most ``Z``."""
    l1 = mass(u.abs())
    if l1 > Z * (1 + 1e-12):
        raise ValueError(f"L1 norm {l1:.6g} exceeds Z = {Z}")
    ea = total_energy(u.abs(), Z, solver)
    e = total_energy(u, Z, solver)
    return InequalityReport(
        "abs_comparison", ea.total, e.total, digest("abs", u, Z),
        detail={"l1": l1, "abs_terms": ea.as_dict(), "signed_terms": e.as_dict()},
    )


# -------------------------------------------------------------- coercivity


def _moments(u: ScalarField3D, Z: float, solver: CoulombSolver):
    ev = evaluate(u.values, Z, solver, with_variation=False)
    vol = u.grid.cell_volume
    _, s2, _, s4, _, _ = ev.sums
    return ev.energy, vol * s2, vol * s4, 2.0 * ev.energy.gradient


def check_coercivity(u: ScalarField3D, Z: float, solver: CoulombSolver, caps=(None, None)):
    """Both coercivity bounds as ``C*`` reports.

    First: ``1/4 int|grad u|^2 + 1/2 int u^2(1-u)^2 + 1/2 D <= E + C Z^2``.
    Second: ``1/4 int|grad u|^2 + 1/4 int(u^2 + u^4) + 1/2 D <= E + C (Z^2 + (int|grad u|^2)^3)``.
    """
    e, s2, s4, grad2 = _moments(u, Z, solver)
    dig = digest("coercivity", u, Z)
    side1 = 0.25 * grad2 + e.double_well + 0.5 * e.coulomb
    side2 = 0.25 * grad2 + 0.25 * (s2 + s4) + 0.5 * e.coulomb
    r1 = _free("coercivity_1", side1, e.total, Z * Z, caps[0], dig, {"energy": e.total})
    r2 = _free("coercivity_2", side2, e.total, Z * Z + grad2**3, caps[1], dig, {"energy": e.total})
    return r1, r2


def check_l3_interpolation(u: ScalarField3D, cap=None) -> InequalityReport:
    """``int u_+^3 <= 1/4 int u^2 + C (int|grad u|^2)^3 + 1/4 int u^4``."""
    from .energy import gradient_energy

    vol = u.grid.cell_volume
    v = u.values
    cube = vol * float(np.sum(np.maximum(v, 0.0) ** 3))
    base = 0.25 * vol * float(np.sum(v * v)) + 0.25 * vol * float(np.sum(v**4))
    grad2 = 2.0 * gradient_energy(u)
    return _free("l3_interpolation", cube, base, grad2**3, cap, digest("l3", u))


# -------------------------------------------------------------- mass bounds


def _minimizer_energy(u, Z, solver):
    e = total_energy(u, Z, solver)
    if e.total > 0:
        raise ValueError(f"energy {e.total:.6g} > 0: not a minimizer (minimal energy is nonpositive)")
    return e


def check_mass_bounds(u: ScalarField3D, Z: float, solver: CoulombSolver, M: float | None = None):
    """``||u||_2^2 <= 2(Z+2)M + 8 pi Z^2`` and ``D(u) <= 2(Z+1)M + 8 pi Z^2``."""
    e = _minimizer_energy(u, Z, solver)
    M = mass(u) if M is None else float(M)
    l2 = u.grid.cell_volume * float(np.sum(u.values**2))
    dig = digest("mass_bounds", u, Z, M)
    return (
        InequalityReport("mass_bound_l2", l2, 2 * (Z + 2) * M + 8 * math.pi * Z * Z, dig, detail={"M": M, "energy": e.total}),
        InequalityReport("mass_bound_coulomb", e.coulomb, 2 * (Z + 1) * M + 8 * math.pi * Z * Z, dig, detail={"M": M}),
    )


def check_improved_mass_bounds(u: ScalarField3D, Z: float, solver: CoulombSolver, caps=(None, None)):
    """``||u||_2^2 <= C (Z^2 + Z^6)`` and ``D(u) <= C Z^2`` as ``C*`` reports."""
    if not mass(u) > 0:
        raise ValueError("degenerate input: zero mass")
    if not Z > 0:
        raise ValueError("Z must be positive")
    e = _minimizer_energy(u, Z, solver)
    l2 = u.grid.cell_volume * float(np.sum(u.values**2))
    dig = digest("improved", u, Z)
    return (
        _free("improved_bound_l2", l2, 0.0, Z**2 + Z**6, caps[0], dig),
        _free("improved_bound_coulomb", e.coulomb, 0.0, Z**2, caps[1], dig),
    )


# ---------------------------------------------------------------- partition


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d(t):
    t = np.clip(t, 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2


@dataclass(frozen=True)
class PartitionSpec:
    """Two-piece partition ``chi_i = g_i((nu . theta(x) - ell) / s)``.

    ``g1 = cos(pi/2 clamp(t))``, ``g2 = sqrt(1 - g1^2)``, and
    ``theta(x) = x eta(|x|)`` where ``eta`` rises from 0 at ``r`` to 1 at
    ``(1 + lam) r`` along a quintic smoothstep.
    """

    r: float
    lam: float = 0.5
    s: float = 1.0
    ell: float = 0.0
    nu: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("r must be >= 0")
        if not 0 < self.lam <= 0.5:
            raise ValueError("lam must lie in (0, 1/2]")
        if not self.s > 0:
            raise ValueError("s must be > 0")
        if not self.ell >= 0:
            raise ValueError("ell must be >= 0")
        nu = np.asarray(self.nu, dtype=float)
        if nu.shape != (3,) or abs(np.linalg.norm(nu) - 1.0) > 1e-12:
            raise ValueError("nu must be a unit 3-vector")

    # profile functions
    @staticmethod
    def g1(t):
        t = np.asarray(t, dtype=float)
        out = np.cos(0.5 * math.pi * np.clip(t, 0.0, 1.0))
        return np.where(t >= 1.0, 0.0, out)

    @classmethod
    def g2(cls, t):
        return np.sqrt(np.maximum(0.0, 1.0 - cls.g1(t) ** 2))

    @staticmethod
    def g_derivative_bound() -> float:
        """``sup(|g1'|^2 + |g2'|^2) = pi^2 / 4``."""
        return math.pi**2 / 4.0

    def eta(self, rho):
        if self.r == 0:
            return np.ones_like(np.asarray(rho, dtype=float))
        return _smoothstep((np.asarray(rho, dtype=float) - self.r) / (self.lam * self.r))

    def theta(self, x):
        """``theta`` at points of shape (..., 3)."""
        x = np.asarray(x, dtype=float)
        rho = np.linalg.norm(x, axis=-1)
        return x * self.eta(rho)[..., None]

    def theta_jacobian_norm(self, rho):
        """Operator norm of ``grad theta`` at radius ``rho``: ``eta + rho eta'``."""
        rho = np.asarray(rho, dtype=float)
        if self.r == 0:
            return np.ones_like(rho)
        t = (rho - self.r) / (self.lam * self.r)
        return np.maximum(self.eta(rho), self.eta(rho) + rho * _smoothstep_d(t) / (self.lam * self.r))

    @property
    def c_theta(self) -> float:
        """``lam * sup|grad theta|`` from dense sampling of the transition shell."""
        if self.r == 0:
            return self.lam
        rho = self.r * (1.0 + self.lam * np.linspace(0.0, 1.0, 20001))
        return self.lam * float(np.max(self.theta_jacobian_norm(rho)))

    @property
    def C(self) -> float:
        """Localization constant ``sup(|g1'|^2+|g2'|^2) * C_theta^2``."""
        return self.g_derivative_bound() * self.c_theta**2

    def grad_sup_sq(self) -> float:
        """Upper bound on ``sum_i ||grad chi_i||_inf^2``."""
        jac = self.c_theta / self.lam
        return 2.0 * (0.5 * math.pi) ** 2 * jac**2 / self.s**2

    def parameter(self, grid: Grid3D) -> np.ndarray:
        x, y, z = grid.coords()
        pts = np.stack((x, y, z), axis=-1)
        return (self.theta(pts) @ np.asarray(self.nu, dtype=float) - self.ell) / self.s

    def chi(self, grid: Grid3D):
        t = self.parameter(grid)
        return self.g1(t), self.g2(t)


# ------------------------------------------------------------------ IMS


def check_ims_split(u: ScalarField3D, Z: float, part: PartitionSpec, solver: CoulombSolver, transition_floor=1e-12):
    """Localization bound for the two-piece partition.

    ``sum_i E(f_i^2 u) - E(u) <= [sum_i D(f_i^2 u) - D(u)]
    + [sum_i ||grad f_i||^2] int_A u^2 + min(4 int_A u^2, 8 int_A u)``.
    """
    if u.grid != solver.grid:
        raise ValueError("field and solver grids differ")
    if np.any(u.values < 0):
        raise ValueError("field must be nonnegative")
    f1, f2 = part.chi(u.grid)
    cover = float(np.max(np.abs(f1 * f1 + f2 * f2 - 1.0)))
    if cover > 1e-12:
        raise ValueError(f"partition does not cover the grid (max defect {cover:.3g})")
    vol = u.grid.cell_volume
    pieces = [ScalarField3D(u.grid, f * f * u.values) for f in (f1, f2)]
    e0 = total_energy(u, Z, solver)
    ep = [total_energy(p, Z, solver) for p in pieces]
    lhs = sum(e.total for e in ep) - e0.total
    rep = sum(e.coulomb for e in ep) - e0.coulomb
    A = (f1 > transition_floor) & (f2 > transition_floor)
    a2 = vol * float(np.sum(u.values[A] ** 2))
    a1 = vol * float(np.sum(u.values[A]))
    grad_sq = part.grad_sup_sq()
    well = min(4.0 * a2, 8.0 * a1)
    rhs = rep + grad_sq * a2 + well
    small = A & (u.values <= 2.0)
    detail = {
        "repulsion_part": rep,
        "gradient_surplus": sum(e.gradient for e in ep) - e0.gradient,
        "double_well_surplus": sum(e.double_well for e in ep) - e0.double_well,
        "attraction_surplus": sum(e.attraction for e in ep) - e0.attraction,
        "gradient_bound": grad_sq * a2,
        "double_well_bound": well,
        "double_well_cubic": 2.0 * vol * float(np.sum(u.values[small] ** 3)),
        "int_A_u": a1,
        "int_A_u2": a2,
        "partition_C": part.C,
    }
    return InequalityReport("ims_split", lhs, rhs, digest("ims", u, Z, part), detail=detail)


# -------------------------------------------------------------- localization


def screened_tail(u: ScalarField3D, Z: float, r: float, solver: CoulombSolver):
    """``sup_{|z| >= r} |z| Phi_r(z)``, sup over grid points plus the tail limit.

    ``Phi_r = Z/|x| - (u 1_{B_r}) * |x|^-1``; as ``|z| -> inf`` the product
    tends to ``Z - m_inner``.
    """
    rad = u.grid.radius()
    inner = np.where(rad < r, u.values, 0.0)
    m_inner = u.grid.cell_volume * float(np.sum(inner))
    phi = solver.potential_values(inner)
    out = rad >= r
    grid_sup = float(np.max(rad[out] * (Z / rad[out] - phi[out]))) if out.any() else -math.inf
    tail = Z - m_inner
    return max(grid_sup, tail), grid_sup, tail


def outer_mass_certificate(u: ScalarField3D, Z: float, part: PartitionSpec, solver: CoulombSolver) -> InequalityReport:
    """Outer-mass localization bound at radii ``r`` and ``(1 + lam) r``.

    ``1/8 (int chi_out u)^2 <= 2 s D(chi_out u) + C/(lam^2 s^2) int_{|x|>=r} u^2
    + (8 + 1/4 sup |z| Phi_r(z)) int_{|x|>=r} u``, with ``chi_out`` the indicator
    of ``|x| >= (1 + lam) r``. A violation on a computed state is a sign that
    it is not a minimizer.
    """
    g = u.grid
    r, lam, s = part.r, part.lam, part.s
    if r < 4 * g.h:
        raise ValueError(f"r = {r} is below 4h = {4 * g.h}")
    rad = g.radius()
    vol = g.cell_volume
    far = np.where(rad >= (1 + lam) * r, u.values, 0.0)
    outer = rad >= r
    m_far = vol * float(np.sum(far))
    m_out = vol * float(np.sum(u.values[outer]))
    l2_out = vol * float(np.sum(u.values[outer] ** 2))
    d_far = solver.repulsion(far, far)
    sup, grid_sup, tail = screened_tail(u, Z, r, solver)
    C = part.C
    lhs = m_far**2 / 8.0
    rhs = 2 * s * d_far + C / (lam * lam * s * s) * l2_out + (8.0 + 0.25 * sup) * m_out
    detail = {
        "m_far": m_far, "m_outer": m_out, "l2_outer": l2_out, "coulomb_far": d_far,
        "sup_screened": sup, "sup_grid": grid_sup, "sup_tail": tail, "C": C,
    }
    return InequalityReport("outer_mass_certificate", lhs, rhs, digest("outer_mass", u, Z, part), detail=detail)


# ------------------------------------------------------------ nonexistence


def nonexistence_rhs(M, s, Z, C, lam=0.5):
    """Right side of the large-mass contradiction, as a function of ``s``."""
    l2 = 2 * (Z + 2) * M + 8 * math.pi * Z * Z
    dd = 2 * (Z + 1) * M + 8 * math.pi * Z * Z
    return 2 * dd * s + C * l2 / (lam * lam * s * s) + (8 + Z / 4.0) * M


def optimal_s(M, Z, C, lam=0.5, rtol=1e-6):
    """Golden-section minimization of :func:`nonexistence_rhs` over ``log s``."""
    f = lambda x: nonexistence_rhs(M, math.exp(x), Z, C, lam)  # noqa: E731
    a, b = math.log(1e-8), math.log(1e8)
    gr = (math.sqrt(5) - 1) / 2
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return math.exp(x), f(x)


def nonexistence_threshold(Z: float, C: float, lam: float = 0.5, M0: float = 1e-3, ratio: float = 1.001, M_max: float = 1e12):
    """Smallest ``M`` on a geometric scan where ``M^2/8`` beats the optimized bound."""
    if not Z >= 0:
        raise ValueError("Z must be >= 0")
    if not C > 0:
        raise ValueError("C must be > 0")
    M = M0
    while M <= M_max:
        _, best = optimal_s(M, Z, C, lam)
        if M * M / 8.0 > best:
            return M
        M *= ratio
    raise ArithmeticError("no threshold below M_max")


# --------------------------------------------------------- Euler-Lagrange


def _kkt_parts(u, Z, solver, floor):
    ev = evaluate(u.values, Z, solver)
    fv = ev.fv
    active = u.values > floor
    if not active.any():
        raise ValueError("field has empty support")
    ua = u.values[active]
    mu = float(np.dot(ua, fv[active]) / ua.sum())
    res = math.sqrt(u.grid.cell_volume * float(np.sum((fv[active] - mu) ** 2)))
    return fv, active, mu, res


def check_el_raw(u: ScalarField3D, Z: float, solver: CoulombSolver, tol: float = 0.0):
    """If ``first_variation >= -tol`` on the whole grid, require ``mass >= Z``.

    Returns ``None`` when the hypothesis fails (no conclusion).
    """
    fv = evaluate(u.values, Z, solver).fv
    fmin = float(fv.min())
    if fmin < -tol:
        return None
    m = mass(u)
    return InequalityReport("el_mass_conclusion", Z, m, digest("elraw", u, Z), detail={"min_first_variation": fmin})


def check_el_inequality(u: ScalarField3D, Z: float, solver: CoulombSolver, *, floor: float | None = None,
                        kkt_tol: float = 1e-5, tol: float = 1e-3):
    """One-sided stationarity with multiplier shift, and the mass diagnostic.

    On ``{u <= floor}`` the first variation must stay above ``mu_hat - tol``.
    The second report applies the raw inequality: when it holds with
    ``mu_hat >= 0`` the mass must be at least ``Z``; otherwise it is skipped.
    """
    m = mass(u)
    if not m > 0:
        raise ValueError("zero-mass field")
    floor = 1e-8 * m / u.grid.L**3 if floor is None else floor
    fv, active, mu, res = _kkt_parts(u, Z, solver, floor)
    if res > kkt_tol:
        raise ValueError(f"not converged: KKT residual {res:.3g} > {kkt_tol:.3g}")
    low = ~active
    worst = float(np.max(mu - fv[low])) if low.any() else -math.inf
    dig = digest("el", u, Z)
    shifted = InequalityReport(
        "el_shifted", worst, tol, dig,
        detail={"mu_hat": mu, "kkt_residual": res, "raw_min": float(fv.min())},
    )
    if mu >= 0 and float(fv.min()) >= -tol:
        conc = InequalityReport("el_mass_conclusion", Z, m, dig, detail={"mu_hat": mu})
    else:
        conc = InequalityReport.skip("el_mass_conclusion", f"raw inequality fails (mu_hat = {mu:.4g})")
    return shifted, conc


def el_fixture_charge(u: ScalarField3D, solver: CoulombSolver) -> float:
    """Largest ``Z`` with ``first_variation_Z(u) >= 0`` on the grid.

    The first variation is affine in ``Z`` with slope ``-w`` (the attraction
    weights), so this is ``min(F_0 / w)`` over the grid, clipped at 0.
    """
    f0 = evaluate(u.values, 0.0, solver).fv
    w = attraction_weights(u.grid)
    return max(0.0, float(np.min(f0 / w)))


# ------------------------------------------------------------------ curve


@dataclass(frozen=True)
class CurveReport:
    monotone: bool
    negative: bool
    bounded_below: bool
    zero_at_zero: bool
    max_increase: float
    max_energy: float
    min_energy: float
    lower_bound: float

    @property
    def passed(self) -> bool:
        return self.monotone and self.negative and self.bounded_below and self.zero_at_zero

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def check_I_curve(curve, Z: float, c_cap: float, slack: float = 1e-3) -> CurveReport:
    """Nonincreasing within ``slack``, negative for ``M > 0``, at least ``-c_cap Z^2``.

    ``curve`` is a sequence of ``(M, energy)`` pairs or objects with ``M`` and
    ``energy`` attributes, in increasing ``M``.
    """
    pts = []
    for p in curve:
        if hasattr(p, "M"):
            e = p.energy.total if isinstance(p.energy, EnergyBreakdown) else float(p.energy)
            pts.append((float(p.M), e))
        else:
            pts.append((float(p[0]), float(p[1])))
    Ms = [m for m, _ in pts]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError("curve masses must be strictly increasing")
    es = [e for _, e in pts]
    inc = max((b - a for a, b in zip(es, es[1:])), default=-math.inf)
    pos = [e for m, e in pts if m > 0]
    lower = -c_cap * Z * Z
    return CurveReport(
        monotone=inc <= slack,
        negative=all(e < 0 for e in pos),
        bounded_below=all(e >= lower for e in es),
        zero_at_zero=all(e == 0.0 for m, e in pts if m == 0),
        max_increase=inc,
        max_energy=max(pos, default=-math.inf),
        min_energy=min(es, default=math.inf),
        lower_bound=lower,
    )


# ------------------------------------------------------------ radial oracle


def radial_tail_limit(p: RadialProfile, Z: float, r: float) -> float:
    """``|z| Phi_r(z)`` at the last profile radius, for radial densities."""
    inner = RadialProfile(p.r, np.where(p.r < r, p.values, 0.0))
    phi = newton_potential_radial(inner)
    return float(p.r[-1] * (Z / p.r[-1] - phi.values[-1])), Z - radial_mass(inner)


def reports_to_json(reports) -> str:
    return json.dumps([r.as_dict() for r in reports], indent=2, default=float)


def reports_table(reports) -> str:
    rows = [f"{'check':<26} {'lhs':>14} {'rhs':>14} {'margin':>12} {'C*':>10} {'kind':>5} status"]
    for r in reports:
        cs = "" if r.c_star is None or not math.isfinite(r.c_star) else f"{r.c_star:.4g}"
        kind = "hard" if r.hard else "free"
        if r.skipped:
            rows.append(f"{r.name:<26} {'':>14} {'':>14} {'':>12} {'':>10} {kind:>5} skipped ({r.detail.get('reason', '')})")
            continue
        st = "pass" if r.passed else "FAIL"
        rows.append(f"{r.name:<26} {r.lhs:>14.6g} {r.rhs:>14.6g} {r.margin:>12.4g} {cs:>10} {kind:>5} {st}")
    return "\n".join(rows)
