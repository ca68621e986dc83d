"""Committed reference values for the free-constant checks.

The trial family is fixed: scaled Gaussians for the two coercivity bounds,
scaled smooth bumps and Gaussians for the cubic interpolation bound, and
computed minimizers for the improved mass bounds, all on a 48^3 grid of side
12. ``python -m nldw.reference`` regenerates ``data/cstar_reference.json``;
caps used by the checks are twice the committed family maxima.
"""

from __future__ import annotations

import argparse
import json
import math
from importlib import resources
from pathlib import Path

from .coulomb import CoulombSolver
from .fields import Grid3D, ModelParams, gaussian, smooth_bump
from .minimize import minimize
from .verify import check_coercivity, check_improved_mass_bounds, check_l3_interpolation

REFERENCE_FILE = "cstar_reference.json"
CAP_FACTOR = 2.0
GRID = (48, 12.0)
GAUSSIAN_SCALES = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0)
BUMP_AMPLITUDES = (0.125, 0.5, 2.0)  # c * 1/2 for c in {1/4, 1, 4}
MINIMIZER_RUNS = ((1.0, 0.2), (1.0, 0.5), (1.0, 1.0), (2.0, 0.5))


def reference_grid() -> Grid3D:
    return Grid3D.from_extent(*GRID)


def family_cstar(grid: Grid3D | None = None, with_minimizers: bool = True) -> dict:
    """``C*`` per family member, keyed by constant name then member label."""
    g = reference_grid() if grid is None else grid
    solver = CoulombSolver(g)
    out = {"coercivity_1": {}, "coercivity_2": {}, "l3_interpolation": {}}
    for sig in GAUSSIAN_SCALES:
        r1, r2 = check_coercivity(gaussian(g, amplitude=sig), 1.0, solver)
        out["coercivity_1"][f"gauss_{sig:g}"] = r1.c_star
        out["coercivity_2"][f"gauss_{sig:g}"] = r2.c_star
        out["l3_interpolation"][f"gauss_{sig:g}"] = check_l3_interpolation(gaussian(g, amplitude=sig)).c_star
    for amp in BUMP_AMPLITUDES:
        out["l3_interpolation"][f"bump_{amp:g}"] = check_l3_interpolation(smooth_bump(g, 3.0, amplitude=amp)).c_star
    if with_minimizers:
        out["improved_bound_l2"] = {}
        out["improved_bound_coulomb"] = {}
        for Z, M in MINIMIZER_RUNS:
            rep = minimize(ModelParams(Z=Z, M=M, grid=g), "gaussian", solver)
            a, b = check_improved_mass_bounds(rep.u, Z, solver)
            out["improved_bound_l2"][f"Z{Z:g}_M{M:g}"] = a.c_star
            out["improved_bound_coulomb"][f"Z{Z:g}_M{M:g}"] = b.c_star
    return out


def summarize(members: dict) -> dict:
    return {k: {"members": v, "max": max(v.values())} for k, v in members.items()}


def load_reference() -> dict:
    text = resources.files("nldw").joinpath("data", REFERENCE_FILE).read_text()
    return json.loads(text)


def caps() -> dict:
    """Cap per constant: ``CAP_FACTOR`` times the committed family maximum."""
    ref = load_reference()["constants"]
    return {k: CAP_FACTOR * v["max"] for k, v in ref.items()}


def within_factor(value: float, ref: float, factor: float = CAP_FACTOR) -> bool:
    """``ref/factor <= value <= factor*ref`` for positive ``ref``."""
    if not (math.isfinite(value) and ref > 0):
        return False
    return ref / factor <= value <= ref * factor


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="regenerate the committed C* reference")
    ap.add_argument("--out", type=Path, default=Path(__file__).parent / "data" / REFERENCE_FILE)
    args = ap.parse_args(argv)
    doc = {
        "grid": {"n": GRID[0], "L": GRID[1]},
        "cap_factor": CAP_FACTOR,
        "constants": summarize(family_cstar()),
    }
    args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
