"""Convergence and energy studies built on :mod:`savwave.stepper`."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from .model import Example, Problem, example_problem
from .spectral import linf_norm, make_grid
from .stepper import EnergyRecord, SavState, run, start

log = logging.getLogger(__name__)


class EnergyIncrease(RuntimeError):
    pass


@dataclass
class ErrorRow:
    """Errors of one run against the reference; ``param`` is τ or N."""

    param: float
    e_u_inf: float
    e_v_inf: float
    e_r: float
    e_u_seminorm: float
    e_u_l2: float
    e_v_l2: float
    rates: dict[str, float | None] = field(default_factory=dict)


@dataclass
class StudyConfig:
    problem: Problem
    example: Example = Example.EXAMPLE1
    n_ref: int = 64
    k_ref: int = 1000
    tau_list: list[float] = field(default_factory=lambda: [1 / 10, 1 / 20, 1 / 40])
    n_list: list[int] = field(default_factory=lambda: [4, 8, 16, 32])
    verify: bool = True
    # optional (problem) -> (u0, v0) replacing the preset initial data
    initial: Callable[[Problem], tuple[np.ndarray, np.ndarray]] | None = None

    def start(self, p: Problem) -> SavState | None:
        if self.initial is None:
            return None
        u0, v0 = self.initial(p)
        return start(p, u0=u0, v0=v0)


ERROR_KEYS = ("e_u_inf", "e_v_inf", "e_r", "e_u_seminorm", "e_u_l2", "e_v_l2")


def observed_rate(e_coarse: float, e_fine: float) -> float:
    """``log2(e_coarse / e_fine)`` for a halving sequence."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(f"rates need positive errors, got {e_coarse!r}, {e_fine!r}")
    return math.log2(e_coarse / e_fine)


def compute_errors(sol: SavState, ref: SavState, p: Problem, param: float = float("nan")) -> ErrorRow:
    """Compare ``sol`` (on ``p.grid``) with ``ref`` at the same time.

    A reference on a finer grid is spectrally truncated onto ``p.grid``.
    """
    if abs(sol.t - ref.t) > 1e-12 * max(1.0, abs(ref.t)):
        raise ValueError(f"time mismatch: solution at t={sol.t!r}, reference at t={ref.t!r}")
    grid = p.grid
    e_u = grid.check(sol.u) - grid.restrict(ref.u)
    e_v = grid.check(sol.v) - grid.restrict(ref.v)
    return ErrorRow(
        param=param,
        e_u_inf=linf_norm(e_u),
        e_v_inf=linf_norm(e_v),
        e_r=abs(sol.R - ref.R),
        e_u_seminorm=grid.seminorm(e_u, p.alpha / 2),
        e_u_l2=grid.l2_norm(e_u),
        e_v_l2=grid.l2_norm(e_v),
    )


def fill_rates(rows: list[ErrorRow]) -> list[ErrorRow]:
    for prev, row in zip(rows, rows[1:]):
        for key in ERROR_KEYS:
            a, b = getattr(prev, key), getattr(row, key)
            row.rates[key] = observed_rate(a, b) if a > 0 and b > 0 else None
    if rows:
        rows[0].rates = {key: None for key in ERROR_KEYS}
    return rows


def temporal_study(cfg: StudyConfig) -> list[ErrorRow]:
    """Errors at ``t = T`` for each τ against a run with ``k_ref`` steps on the same grid."""
    p = cfg.problem
    tau_ref = p.T / cfg.k_ref
    if any(tau < tau_ref * (1 - 1e-12) for tau in cfg.tau_list):
        raise ValueError(f"reference step {tau_ref:g} must not be coarser than any tested step")
    ref, _ = run(p, cfg.example, steps=cfg.k_ref, state0=cfg.start(p), verify=cfg.verify)
    rows = []
    for tau in cfg.tau_list:
        sol, _ = run(p, cfg.example, tau=tau, state0=cfg.start(p), verify=cfg.verify)
        rows.append(compute_errors(sol, ref, p, param=tau))
        log.info("tau=%g  e_u_inf=%.4e", tau, rows[-1].e_u_inf)
    return fill_rates(rows)


def spatial_study(cfg: StudyConfig) -> list[ErrorRow]:
    """Errors for each N against an ``n_ref`` run, all with ``k_ref`` steps."""
    p = cfg.problem
    if any(n > cfg.n_ref for n in cfg.n_list):
        raise ValueError(f"reference resolution {cfg.n_ref} must not be coarser than any tested N")
    bounds = p.grid.bounds
    p_ref = replace(p, grid=make_grid(cfg.n_ref, bounds))
    ref, _ = run(p_ref, cfg.example, steps=cfg.k_ref, state0=cfg.start(p_ref), verify=cfg.verify)
    rows = []
    for n in cfg.n_list:
        p_n = replace(p, grid=make_grid(n, bounds))
        sol, _ = run(p_n, cfg.example, steps=cfg.k_ref, state0=cfg.start(p_n), verify=cfg.verify)
        rows.append(compute_errors(sol, ref, p_n, param=n))
        log.info("N=%d  |e_u|_a/2=%.4e", n, rows[-1].e_u_seminorm)
    return fill_rates(rows)


def energy_study(
    p: Problem,
    which: Example | str,
    steps: int,
    gammas: list[tuple[float, float]],
    verify: bool = True,
) -> dict[tuple[float, float], list[EnergyRecord]]:
    """One energy ledger per damping pair ``(γ₁, γ₂)``.

    Raises :class:`EnergyIncrease` if a damped run ever gains energy beyond
    ``1e-12 H⁰``.
    """
    ledgers = {}
    for g1, g2 in gammas:
        q = replace(p, gamma1=float(g1), gamma2=float(g2))
        _, ledger = run(q, which, steps=steps, verify=verify)
        if g1 > 0 or g2 > 0:
            H = np.array([rec.H for rec in ledger])
            slack = 1e-12 * H[0]
            worst = float(np.max(np.diff(H))) if len(H) > 1 else 0.0
            if worst > slack:
                raise EnergyIncrease(f"energy increased by {worst:.3e} with gammas ({g1}, {g2})")
        ledgers[(float(g1), float(g2))] = ledger
    return ledgers


def example1_case(nx: int, alpha: float, case: int, **overrides) -> Problem:
    """Sine-Gordon preset; case 1 is undamped, case 2 has γ₁ = γ₂ = 1."""
    if case not in (1, 2):
        raise ValueError(f"case must be 1 or 2, got {case!r}")
    gamma = 0.0 if case == 1 else 1.0
    return example_problem(Example.EXAMPLE1, nx, alpha=alpha, gamma1=gamma, gamma2=gamma, **overrides)
