"""Run configuration: a flat JSON document, optionally overridden by flags."""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field, fields
from pathlib import Path

from .model import Example, Potential, Problem
from .spectral import make_grid
from .stepper import NonIntegerStepCount, step_count

MODES = ("run", "converge-time", "converge-space", "energy")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    example: Example
    mode: str
    alpha: float = 1.2
    kappa: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    potential: Potential | None = None
    c0: float | None = None
    nx: int = 64
    tau: float | None = None
    steps: int | None = None
    T: float | None = None
    xmin: float | None = None
    xmax: float | None = None
    ymin: float | None = None
    ymax: float | None = None
    tau_list: list[float] = field(default_factory=lambda: [1 / 10, 1 / 20, 1 / 40])
    n_list: list[int] = field(default_factory=lambda: [4, 8, 16, 32])
    gamma_list: list[tuple[float, float]] = field(
        default_factory=lambda: [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)]
    )
    outdir: Path = Path(".")
    n_ref: int = 64
    k_ref: int = 1000

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def problem(self, nx: int | None = None, **overrides) -> Problem:
        params = dict(
            alpha=self.alpha,
            kappa=self.kappa,
            gamma1=self.gamma1,
            gamma2=self.gamma2,
            potential=self.potential,
            c0=self.c0,
            T=self.T,
        )
        params.update(overrides)
        return Problem(grid=make_grid(nx or self.nx, self.bounds), **params)


KEYS = tuple(f.name for f in fields(RunConfig))


def _real(key, value, *, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{key} must be positive, got {value!r}")
    if nonneg and value < 0:
        raise ConfigError(f"{key} must be non-negative, got {value!r}")
    return float(value)


def _int(key, value, *, minimum=1, even=False) -> int:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value!r}")
    if even and value % 2:
        raise ConfigError(f"{key} must be even, got {value!r}")
    return int(value)


def _list(key, value) -> list:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{key}: expected a non-empty list, got {value!r}")
    return list(value)


def load_document(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge the JSON document at ``path`` with ``overrides`` (which win) and validate."""
    raw = load_document(path) if path is not None else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    # tau and steps are alternatives; one given as an override replaces the other
    if "tau" in overrides:
        raw.pop("steps", None)
    if "steps" in overrides:
        raw.pop("tau", None)
    raw.update(overrides)
    return validate(raw)


def validate(raw: dict) -> RunConfig:
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(map(repr, unknown))}")
    for key in ("example", "mode"):
        if raw.get(key) is None:
            raise ConfigError(f"{key} is required")

    try:
        example = Example(raw["example"])
    except ValueError:
        choices = ", ".join(e.value for e in Example)
        raise ConfigError(f"example must be one of {choices}, got {raw['example']!r}") from None
    mode = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")

    cfg = RunConfig(example=example, mode=mode)

    if "alpha" in raw:
        cfg.alpha = _real("alpha", raw["alpha"])
    if not 1.0 < cfg.alpha <= 2.0:
        raise ConfigError(f"alpha must lie in (1,2], got {cfg.alpha!r}")
    if "kappa" in raw:
        cfg.kappa = _real("kappa", raw["kappa"], positive=True)
    for key in ("gamma1", "gamma2"):
        if key in raw:
            setattr(cfg, key, _real(key, raw[key], nonneg=True))

    potential = raw.get("potential")
    if potential is None:
        cfg.potential = example.potential
    else:
        try:
            cfg.potential = Potential(potential)
        except ValueError:
            choices = ", ".join(p.value for p in Potential)
            raise ConfigError(f"potential must be one of {choices}, got {potential!r}") from None

    cfg.nx = _int("nx", raw.get("nx", cfg.nx), minimum=2, even=True)
    cfg.T = _real("T", raw["T"], positive=True) if raw.get("T") is not None else example.final_time

    xmin, xmax, ymin, ymax = example.bounds
    cfg.xmin = _real("xmin", raw.get("xmin", xmin))
    cfg.xmax = _real("xmax", raw.get("xmax", xmax))
    cfg.ymin = _real("ymin", raw.get("ymin", ymin))
    cfg.ymax = _real("ymax", raw.get("ymax", ymax))
    if not cfg.xmax > cfg.xmin:
        raise ConfigError(f"xmax must exceed xmin, got ({cfg.xmin}, {cfg.xmax})")
    if not cfg.ymax > cfg.ymin:
        raise ConfigError(f"ymax must exceed ymin, got ({cfg.ymin}, {cfg.ymax})")

    if raw.get("c0") is not None:
        cfg.c0 = _real("c0", raw["c0"], positive=True)

    tau, steps = raw.get("tau"), raw.get("steps")
    if tau is not None and steps is not None:
        raise ConfigError("give at most one of tau and steps")
    if tau is not None:
        cfg.tau = _real("tau", tau, positive=True)
        try:
            cfg.steps = step_count(cfg.T, cfg.tau)
        except NonIntegerStepCount as exc:
            raise ConfigError(f"tau: {exc}") from None
    else:
        cfg.steps = _int("steps", steps if steps is not None else 1000)
        cfg.tau = cfg.T / cfg.steps

    if "tau_list" in raw:
        cfg.tau_list = [_real("tau_list", t, positive=True) for t in _list("tau_list", raw["tau_list"])]
    for t in cfg.tau_list if mode == "converge-time" else ():
        try:
            step_count(cfg.T, t)
        except NonIntegerStepCount as exc:
            raise ConfigError(f"tau_list: {exc}") from None
    if "n_list" in raw:
        cfg.n_list = [_int("n_list", n, minimum=2, even=True) for n in _list("n_list", raw["n_list"])]
    if "gamma_list" in raw:
        pairs = []
        for pair in _list("gamma_list", raw["gamma_list"]):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"gamma_list: entries must be [gamma1, gamma2] pairs, got {pair!r}")
            pairs.append(tuple(_real("gamma_list", g, nonneg=True) for g in pair))
        cfg.gamma_list = pairs
    cfg.n_ref = _int("n_ref", raw.get("n_ref", cfg.n_ref), minimum=2, even=True)
    cfg.k_ref = _int("k_ref", raw.get("k_ref", cfg.k_ref))

    if mode == "converge-time" and min(cfg.tau_list) < cfg.T / cfg.k_ref * (1 - 1e-12):
        raise ConfigError("tau_list: every step must be at least the reference step T/k_ref")
    if mode == "converge-space" and max(cfg.n_list) > cfg.n_ref:
        raise ConfigError("n_list: every resolution must be at most n_ref")

    outdir = raw.get("outdir", ".")
    if not isinstance(outdir, (str, Path)):
        raise ConfigError(f"outdir: expected a path, got {outdir!r}")
    cfg.outdir = Path(outdir)

    try:
        cfg.problem()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
