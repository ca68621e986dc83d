"""Batch driver: ``nldw energy|minimize|sweep|verify``.

Exit codes: 0 success, 2 bad input (config, checkpoint, arguments).
``minimize`` returns 0 converged, 3 mass_escape, 4 max_iters. ``sweep``
returns 1 only if every point failed. ``verify`` returns 1 iff a hard check
fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, RunConfig

log = logging.getLogger("nldw")

EXIT_BAD_INPUT = 2


class UsageError(Exception):
    pass


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    over = {}
    for key in ("Z", "M", "n", "L", "max_iters", "init", "field"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    if getattr(args, "masses", None) is not None:
        over["masses"] = tuple(float(x) for x in args.masses.split(",") if x.strip())
    return cfg.with_overrides(**over) if over else cfg


def _echo_config(cfg: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.to_text())
    (out / "config.json").write_text(cfg.to_json() + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, default=float) + "\n")


def _checkpoint(path, cfg: RunConfig):
    from .fields import load_field

    u = load_field(path)
    if u.grid != cfg.grid():
        log.info("checkpoint grid n=%d h=%g overrides config grid", u.grid.n, u.grid.h)
    return u


def cmd_energy(cfg: RunConfig, out: Path | None) -> int:
    from .coulomb import CoulombSolver
    from .energy import total_energy

    if not cfg.field:
        raise UsageError("energy needs a field checkpoint (--field or field = ...)")
    u = _checkpoint(cfg.field, cfg)
    e = total_energy(u, cfg.Z, CoulombSolver(u.grid))
    text = e.to_json()
    print(text)
    if out is not None:
        _echo_config(cfg, out)
        (out / "energy.json").write_text(text + "\n")
    return 0


def _init_for(cfg: RunConfig):
    if cfg.init in ("gaussian", "ball", "bump"):
        return cfg.init
    return _checkpoint(cfg.init, cfg)


def cmd_minimize(cfg: RunConfig, out: Path) -> int:
    from .coulomb import CoulombSolver
    from .fields import save_field
    from .minimize import minimize

    params = cfg.params()
    _echo_config(cfg, out)
    solver = CoulombSolver(params.grid)
    rep = minimize(params, _init_for(cfg), solver)
    summary = rep.summary()
    summary["solver"] = solver.describe()
    _write_json(out / "report.json", summary)
    save_field(out / "final.nldw", rep.u)
    st = rep.state
    print(
        f"status={rep.status} iters={st.iter} energy={st.energy.total:.10g} "
        f"kkt={st.kkt_residual:.3e} outer_fraction={st.outer_fraction:.4f} mu_hat={st.mu_hat:.6g}"
    )
    return rep.exit_code


def cmd_sweep(cfg: RunConfig, out: Path, jobs: int) -> int:
    from .minimize import sweep, write_sweep_csv
    from .svg import line_plot

    if not cfg.masses:
        raise UsageError("sweep needs a nonempty mass list")
    params = cfg.params()
    _echo_config(cfg, out)
    try:
        pts = sweep(params, cfg.masses, jobs=jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_sweep_csv(pts, out / "sweep.csv")
    svg = line_plot(
        [p.M for p in pts], [p.energy.total for p in pts], [p.status for p in pts],
        title=f"ground-state estimate, Z = {cfg.Z:g}", ylabel="I_Z(M) estimate",
    )
    (out / "sweep.svg").write_text(svg)
    for p in pts:
        print(f"M={p.M:<8g} energy={p.energy.total:<16.10g} status={p.status:<12} iters={p.iters} start={p.start}")
    positive = [p for p in pts if p.M > 0]
    if positive and all(p.status == "failed" for p in positive):
        return 1
    return 0


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    from .suite import hard_failures, run_suite
    from .verify import reports_table

    u = _checkpoint(cfg.field, cfg) if cfg.field else None
    if u is not None and u.grid != cfg.grid():
        cfg = cfg.with_overrides(n=u.grid.n, L=u.grid.L)
    _echo_config(cfg, out)
    reports = run_suite(cfg, u)
    _write_json(out / "verify.json", [r.as_dict() for r in reports])
    table = reports_table(reports)
    (out / "verify.txt").write_text(table + "\n")
    print(table)
    bad = hard_failures(reports)
    if bad:
        print(f"{len(bad)} hard check(s) failed: {', '.join(r.name for r in bad)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value run configuration")
    common.add_argument("--out", type=Path, help="output directory (default: out; energy writes files only when given)")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--Z", type=float)
    common.add_argument("--M", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--L", type=float)
    common.add_argument("--max-iters", dest="max_iters", type=int)

    ap = argparse.ArgumentParser(prog="nldw", description="nonlocal diffuse-interface energy solver and estimate checks")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("energy", parents=[common], help="energy breakdown of a checkpoint")
    p.add_argument("--field", help="field checkpoint")
    p = sub.add_parser("minimize", parents=[common], help="constrained minimization")
    p.add_argument("--init", help="gaussian | ball | bump | checkpoint path")
    p = sub.add_parser("sweep", parents=[common], help="ground-state curve over masses")
    p.add_argument("--masses", help="comma list of masses")
    p = sub.add_parser("verify", parents=[common], help="run the estimate checks")
    p.add_argument("--field", help="minimizer checkpoint for the minimizer checks")
    return ap


def main(argv=None) -> int:
    from .fields import CheckpointError

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        cfg = _load_config(args)
        if args.command == "energy":
            return cmd_energy(cfg, args.out)
        out = args.out or Path("out")
        if args.command == "minimize":
            return cmd_minimize(cfg, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, args.jobs)
        return cmd_verify(cfg, out)
    except (ConfigError, CheckpointError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
