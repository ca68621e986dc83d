"""Run configuration as flat ``key = value`` text.

Lines are ``key = value``; ``#`` starts a comment. Every key below is typed
and unknown keys are errors. ``to_text`` writes every key in a fixed order
with ``repr`` floats, so ``parse(to_text(c)) == c``.

Keys
    Z, M                  charge and target mass
    n, L                  points per axis and box side
    tol_grad, tol_mass, max_iters, tau0, tau_min, tau_max
    escape_radius_fraction, escape_threshold, escape_window
    init                  gaussian | ball | bump | path to a checkpoint
    masses                comma list for sweep (may be empty)
    field                 checkpoint for energy / verify (may be empty)
    partition_r, partition_lam, partition_s, partition_ell
    trials                comma list of built-in verify trials
    seed                  RNG seed for generated fixtures
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .fields import Grid3D, ModelParams

TRIALS = ("abs", "coercivity", "l3", "ims", "threshold", "radial", "el_fixture")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"expected a comma list of numbers, got {text!r}") from None


def _names(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class RunConfig:
    Z: float = 1.0
    M: float = 0.5
    n: int = 48
    L: float = 12.0
    tol_grad: float = 1e-5
    tol_mass: float = 1e-10
    max_iters: int = 3000
    tau0: float = 1e-2
    tau_min: float = 1e-12
    tau_max: float = 10.0
    escape_radius_fraction: float = 0.8
    escape_threshold: float = 0.5
    escape_window: int = 50
    init: str = "gaussian"
    masses: tuple = (0.2, 0.4, 0.6, 0.8, 1.0)
    field: str = ""
    partition_r: float = 1.0
    partition_lam: float = 0.5
    partition_s: float = 1.0
    partition_ell: float = 0.0
    trials: tuple = TRIALS
    seed: int = 0

    def __post_init__(self):
        bad = [t for t in self.trials if t not in TRIALS]
        if bad:
            raise ConfigError(f"unknown trials {bad}; known: {', '.join(TRIALS)}")
        try:
            self.grid()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def grid(self) -> Grid3D:
        return Grid3D.from_extent(self.n, self.L)

    def params(self, M: float | None = None) -> ModelParams:
        try:
            return ModelParams(
                Z=self.Z,
                M=self.M if M is None else M,
                grid=self.grid(),
                tol_grad=self.tol_grad,
                tol_mass=self.tol_mass,
                max_iters=self.max_iters,
                tau0=self.tau0,
                escape_radius_fraction=self.escape_radius_fraction,
                tau_min=self.tau_min,
                tau_max=self.tau_max,
                escape_threshold=self.escape_threshold,
                escape_window=self.escape_window,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **kw)

    # ------------------------------------------------------------ text form

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                s = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                s = repr(v)
            else:
                s = str(v)
            lines.append(f"{f.name} = {s}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def parse(cls, text: str) -> RunConfig:
        types = {f.name: f.type for f in fields(cls)}
        defaults = cls()
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, val = (p.strip() for p in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in kw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            kw[key] = _convert(key, val, getattr(defaults, key))
        return cls(**kw)

    @classmethod
    def load(cls, path) -> RunConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.parse(text)


def _convert(key, val, default):
    try:
        if key == "masses":
            return _floats(val)
        if key == "trials":
            return _names(val)
        if isinstance(default, bool):
            return val.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(val)
        if isinstance(default, float):
            return float(val)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {val!r}") from None
    return val
