"""Mass- and sign-constrained minimization by projected gradient descent.

Each step moves along minus the first variation and projects back onto
``{u >= 0, mass = M}`` (shift-and-clip). The trial step comes from the
Barzilai-Borwein quotient of the previous step and is halved until the energy
does not increase, so accepted energies are monotone.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .coulomb import CoulombSolver
from .energy import EnergyBreakdown, evaluate, total_energy
from .fields import (
    ModelParams,
    ScalarField3D,
    gaussian,
    mass,
    outer_mass_fraction,
    project_mass_nonneg,
    smooth_bump,
    uniform_ball,
)

log = logging.getLogger(__name__)

__all__ = [
    "FlowState",
    "MinimizeReport",
    "MinimizationError",
    "initial_field",
    "initial_state",
    "step",
    "minimize",
    "SweepPoint",
    "sweep",
    "write_sweep_csv",
    "SubadditivityReport",
    "subadditivity_check",
    "STATUS_CODES",
]

STATUSES = ("converged", "mass_escape", "max_iters")
STATUS_CODES = {"converged": 0, "mass_escape": 3, "max_iters": 4}
SWEEP_HEADER = ["M", "energy", "gradient", "double_well", "attraction", "coulomb", "status", "iters", "outer_fraction"]


class MinimizationError(FloatingPointError):
    """Non-finite energy during the flow; ``state`` is the last finite iterate."""

    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


@dataclass(frozen=True, eq=False)
class FlowState:
    u: ScalarField3D
    iter: int
    tau: float
    energy: EnergyBreakdown
    kkt_residual: float
    outer_fraction: float
    mu_hat: float
    complementarity: float
    fv: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    stagnated: bool = False
    backtracks: int = 0


def _kkt(u, fv, floor, vol):
    active = u > floor
    if not active.any():
        return math.inf, 0.0, math.inf
    ua = u[active]
    fa = fv[active]
    mu = float(np.dot(ua, fa) / ua.sum())
    res = math.sqrt(vol * float(np.sum((fa - mu) ** 2)))
    inactive = ~active
    comp = float(max(0.0, np.max(mu - fv[inactive]))) if inactive.any() else 0.0
    return res, mu, comp


def _state(u: ScalarField3D, params: ModelParams, ev, it, tau, **kw) -> FlowState:
    res, mu, comp = _kkt(u.values, ev.fv, params.u_floor, params.grid.cell_volume)
    return FlowState(
        u=u,
        iter=it,
        tau=tau,
        energy=ev.energy,
        kkt_residual=res,
        outer_fraction=outer_mass_fraction(u, params.escape_radius),
        mu_hat=mu,
        complementarity=comp,
        fv=ev.fv,
        phi=ev.phi,
        **kw,
    )


def initial_field(params: ModelParams, preset: str = "gaussian") -> ScalarField3D:
    """Built-in starting fields with the target mass."""
    g, M = params.grid, params.M
    if preset == "gaussian":
        u = gaussian(g, width=1.5, mass_target=M)
    elif preset == "ball":
        radius = min(max(1.0, (3.0 * M / (4.0 * math.pi)) ** (1.0 / 3.0)), 0.4 * g.L)
        u = uniform_ball(g, radius, mass_target=M)
    elif preset == "bump":
        u = smooth_bump(g, radius=min(3.0, 0.4 * g.L), mass_target=M)
    else:
        raise ValueError(f"unknown initial preset {preset!r}")
    return project_mass_nonneg(u, M)


def initial_state(params: ModelParams, u0: ScalarField3D, solver: CoulombSolver) -> FlowState:
    if u0.grid != params.grid or solver.grid != params.grid:
        raise ValueError("initial field, solver and params must share a grid")
    u = project_mass_nonneg(u0, params.M)
    ev = evaluate(u.values, params.Z, solver)
    return _state(u, params, ev, 0, params.tau0)


def step(state: FlowState, params: ModelParams, solver: CoulombSolver) -> FlowState:
    """One projected-gradient step with backtracking.

    Returns the input state with ``stagnated=True`` when the step falls below
    ``tau_min`` without an energy decrease.
    """
    u = state.u.values
    e0 = state.energy.total
    tau = state.tau
    backtracks = 0
    while True:
        trial = project_mass_nonneg(ScalarField3D(params.grid, u - tau * state.fv), params.M)
        if np.array_equal(trial.values, u):
            return replace(state, iter=state.iter + 1, stagnated=False, backtracks=backtracks)
        ev = evaluate(trial.values, params.Z, solver, with_variation=False)
        e1 = ev.energy.total
        if not math.isfinite(e1):
            raise MinimizationError(f"non-finite energy at iteration {state.iter + 1}", state)
        if e1 <= e0:
            break
        tau *= 0.5
        backtracks += 1
        if tau < params.tau_min:
            return replace(state, stagnated=True, backtracks=backtracks)
    ev = evaluate(trial.values, params.Z, solver, phi=ev.phi)
    s = trial.values - u
    y = ev.fv - state.fv
    sy = float(np.vdot(s, y))
    if sy > 0:
        tau_next = float(np.vdot(s, s)) / sy
    else:
        tau_next = 2.0 * tau
    tau_next = min(max(tau_next, params.tau_min), params.tau_max)
    return _state(trial, params, ev, state.iter + 1, tau_next, backtracks=backtracks)


@dataclass(frozen=True, eq=False)
class MinimizeReport:
    state: FlowState
    status: str
    energy_history: np.ndarray
    outer_history: np.ndarray
    kkt_history: np.ndarray
    stagnated: bool = False

    @property
    def mu_hat(self) -> float:
        return self.state.mu_hat

    @property
    def u(self) -> ScalarField3D:
        return self.state.u

    @property
    def energy(self) -> EnergyBreakdown:
        return self.state.energy

    @property
    def iterations(self) -> int:
        return self.state.iter

    @property
    def exit_code(self) -> int:
        return STATUS_CODES[self.status]

    def summary(self) -> dict:
        st = self.state
        return {
            "status": self.status,
            "iterations": st.iter,
            "energy": st.energy.as_dict(),
            "kkt_residual": st.kkt_residual,
            "complementarity": st.complementarity,
            "mu_hat": st.mu_hat,
            "outer_fraction": st.outer_fraction,
            "mass": mass(st.u),
            "stagnated": self.stagnated,
            "energy_history": [float(x) for x in self.energy_history],
            "outer_fraction_history": [float(x) for x in self.outer_history],
            "kkt_history": [float(x) for x in self.kkt_history],
        }


def minimize(
    params: ModelParams,
    init: ScalarField3D | str = "gaussian",
    solver: CoulombSolver | None = None,
    callback=None,
) -> MinimizeReport:
    """Run the flow until convergence, sustained mass escape, or ``max_iters``.

    Convergence means the KKT residual (L2 norm of ``fv - mu_hat`` on
    ``{u > u_floor}``) is at most ``tol_grad``. Mass escape means the mass
    fraction beyond ``escape_radius`` stayed above ``escape_threshold`` for
    ``escape_window`` consecutive iterates.
    """
    solver = CoulombSolver(params.grid) if solver is None else solver
    u0 = initial_field(params, init) if isinstance(init, str) else init
    state = initial_state(params, u0, solver)
    energies, outers, kkts = [state.energy.total], [state.outer_fraction], [state.kkt_residual]
    run = 1 if state.outer_fraction > params.escape_threshold else 0
    stagnated = False
    while True:
        if not math.isfinite(state.energy.total):
            raise MinimizationError("non-finite energy", state)
        if state.kkt_residual <= params.tol_grad:
            status = "converged"
            break
        if run >= params.escape_window:
            status = "mass_escape"
            break
        if state.iter >= params.max_iters:
            status = "max_iters"
            break
        state = step(state, params, solver)
        if state.stagnated:
            stagnated = True
            status = "max_iters"
            log.warning("step size underflow at iteration %d (kkt %.3e)", state.iter, state.kkt_residual)
            break
        energies.append(state.energy.total)
        outers.append(state.outer_fraction)
        kkts.append(state.kkt_residual)
        run = run + 1 if state.outer_fraction > params.escape_threshold else 0
        if callback is not None:
            callback(state)
    return MinimizeReport(
        state=state,
        status=status,
        energy_history=np.array(energies),
        outer_history=np.array(outers),
        kkt_history=np.array(kkts),
        stagnated=stagnated,
    )


# -------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class SweepPoint:
    M: float
    energy: EnergyBreakdown
    status: str
    iters: int
    outer_fraction: float
    start: str = ""
    kkt_residual: float = 0.0

    def row(self) -> list:
        e = self.energy
        return [
            repr(self.M), repr(e.total), repr(e.gradient), repr(e.double_well),
            repr(e.attraction), repr(e.coulomb), self.status, self.iters, repr(self.outer_fraction),
        ]


def _point(M, rep: MinimizeReport | None, start):
    if rep is None:
        return SweepPoint(M, EnergyBreakdown.zero(), "converged", 0, 0.0, start="none")
    st = rep.state
    return SweepPoint(M, st.energy, rep.status, st.iter, st.outer_fraction, start, st.kkt_residual)


def _solve(args):
    params, preset = args
    try:
        rep = minimize(params, preset)
    except (MinimizationError, ValueError) as exc:
        log.error("sweep point M=%g start=%s failed: %s", params.M, preset, exc)
        return None
    return rep


def _better(a: MinimizeReport | None, b: MinimizeReport | None):
    if a is None:
        return b
    if b is None:
        return a
    return b if b.state.energy.total < a.state.energy.total else a


def sweep(params: ModelParams, M_list, jobs: int = 1, starts=("gaussian", "ball")):
    """Upper estimates of the ground-state curve on the given masses.

    Each positive mass is minimized from the built-in ``starts`` and from the
    previous mass's best field (rescaled to the new mass); the lowest energy
    wins. ``M = 0`` is recorded as exactly 0 without a solve. The fixed starts
    run in parallel when ``jobs > 1``; warm starts are chained in mass order,
    so results do not depend on ``jobs``.
    """
    Ms = [float(m) for m in M_list]
    if not Ms:
        raise ValueError("mass list is empty")
    if any(b <= a for a, b in zip(Ms, Ms[1:])) or Ms[0] < 0:
        raise ValueError("mass list must be nonnegative and strictly increasing")
    tasks = [(replace(params, M=m), s) for m in Ms if m > 0 for s in starts]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve, tasks))
    else:
        results = [_solve(t) for t in tasks]
    by_mass = {}
    for (p, s), rep in zip(tasks, results):
        by_mass.setdefault(p.M, []).append((s, rep))
    solver = CoulombSolver(params.grid)
    points, prev = [], None
    for m in Ms:
        if m == 0:
            points.append(_point(0.0, None, "none"))
            continue
        cands = list(by_mass[m])
        if prev is not None:
            p = replace(params, M=m)
            warm = ScalarField3D(p.grid, prev.u.values * (m / mass(prev.u)))
            try:
                cands.append(("warm", minimize(p, warm, solver)))
            except (MinimizationError, ValueError) as exc:
                log.error("warm start at M=%g failed: %s", m, exc)
        best, start = None, ""
        for s, rep in cands:
            nb = _better(best, rep)
            if nb is not best:
                best, start = nb, s
        if best is None:
            points.append(SweepPoint(m, EnergyBreakdown(*(math.nan,) * 4), "failed", 0, math.nan, "none"))
        else:
            points.append(_point(m, best, start))
        prev = best if best is not None else prev
    return points


def write_sweep_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_HEADER)
        for p in points:
            w.writerow(p.row())


# ------------------------------------------------------------ subadditivity


@dataclass(frozen=True)
class SubadditivityReport:
    """Two-cluster trial bound ``I(m) <= E_Z(u1) + E_0(u2) + correction``."""

    m: float
    m_prime: float
    distance: float
    I_m: float
    E_u1: float
    E0_u2: float
    cross_repulsion: float
    cross_monopole: float
    attraction_u2: float
    correction: float
    correction_monopole: float
    bound: float
    margin: float
    holds: bool


def subadditivity_check(
    Z: float,
    m: float,
    m_prime: float,
    params: ModelParams,
    *,
    distance: float | None = None,
    bump_radius: float = 1.5,
    runs: dict | None = None,
    tol: float = 1e-8,
) -> SubadditivityReport:
    """Compare the computed ``I_Z(m)`` with a bound-cluster-plus-far-bump trial.

    ``u1`` is the computed minimizer at mass ``m'``; ``u2`` is a smooth bump of
    mass ``m - m'`` centred at ``distance`` along the box diagonal. ``runs``
    may map masses to precomputed :class:`MinimizeReport` objects.
    """
    if not 0 < m_prime <= m:
        raise ValueError("need 0 < m' <= m")
    runs = {} if runs is None else runs
    g = params.grid
    solver = CoulombSolver(g)

    def run(mm):
        if mm not in runs:
            runs[mm] = minimize(replace(params, Z=Z, M=mm), "gaussian", solver)
        return runs[mm]

    rep_m = run(m)
    if m_prime == m:
        e = rep_m.state.energy.total
        return SubadditivityReport(m, m_prime, math.inf, e, e, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, e, 0.0, True)
    u1 = run(m_prime).state.u
    r1 = float(g.radius()[u1.values > params.u_floor].max())
    reach = g.inradius - bump_radius - g.h
    dmax = math.sqrt(3.0) * reach
    d = dmax if distance is None else float(distance)
    if d > dmax + 1e-12 or d - bump_radius <= r1 + 2 * g.h:
        raise ValueError(
            f"box too small: need cluster gap with u1 radius {r1:.3g}, bump radius {bump_radius}, distance {d:.3g} <= {dmax:.3g}"
        )
    c = d / math.sqrt(3.0)
    u2 = smooth_bump(g, bump_radius, center=(c, c, c), mass_target=m - m_prime)
    E_u1 = total_energy(u1, Z, solver).total
    E0_u2 = total_energy(u2, 0.0, solver).total
    cross = 2.0 * solver.repulsion(u1, u2)
    from .energy import attraction

    att2 = attraction(u2, Z)
    corr = cross + att2
    corr_mono = (m_prime - Z) * (m - m_prime) / d
    bound = E_u1 + E0_u2 + corr
    margin = bound - rep_m.state.energy.total
    return SubadditivityReport(
        m=m,
        m_prime=m_prime,
        distance=d,
        I_m=rep_m.state.energy.total,
        E_u1=E_u1,
        E0_u2=E0_u2,
        cross_repulsion=cross,
        cross_monopole=m_prime * (m - m_prime) / d,
        attraction_u2=att2,
        correction=corr,
        correction_monopole=corr_mono,
        bound=bound,
        margin=margin,
        holds=margin >= -tol * (1.0 + abs(bound)),
    )
