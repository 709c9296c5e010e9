"""Linearly implicit SAV time stepping.

Each step reduces to ``D U + c (b, U) b = g`` with ``D`` diagonal in Fourier
space, solved with two mode-wise divisions and one scalar correction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import Example, Problem, b_field, energy_E, initial_state
from .spectral import Grid, stepping_symbol

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-11


class NonIntegerStepCount(ValueError):
    pass


class ResidualError(RuntimeError):
    """A step violated the scheme's equations beyond round-off."""


@dataclass
class SavState:
    """Discrete state ``(u^n, v^n, R^n)`` at ``t = n τ``."""

    n: int
    u: np.ndarray
    v: np.ndarray
    R: float
    t: float = 0.0
    u_prev: np.ndarray | None = None
    u_half_pred: np.ndarray | None = None


@dataclass(frozen=True)
class EnergyRecord:
    n: int
    t: float
    H: float
    kinetic: float
    fractional: float
    sav: float
    dissipation_rhs: float = 0.0


def extrapolate(u_n: np.ndarray, u_prev: np.ndarray) -> np.ndarray:
    return (3.0 * u_n - u_prev) / 2.0


def solve_diag_rank1(grid: Grid, diag: np.ndarray, b: np.ndarray, g: np.ndarray, coef: float) -> np.ndarray:
    """Solve ``D U + coef (b, U) b = g`` by Sherman-Morrison.

    ``diag`` is the half-spectrum multiplier of ``D``; ``(·,·)`` is the grid
    L2 pairing.
    """
    dinv_g = grid.divide_multiplier(g, diag)
    if not np.any(b):
        return dinv_g
    dinv_b = grid.divide_multiplier(b, diag)
    theta = grid.inner(b, dinv_g) / (1.0 + coef * grid.inner(b, dinv_b))
    return dinv_g - (coef * theta) * dinv_b


def rank1_solve(b: np.ndarray, g: np.ndarray, tau: float, p: Problem) -> np.ndarray:
    """Solve ``A U + (τ²/4)(b, U) b = g`` for the main step matrix ``A``."""
    return solve_diag_rank1(p.grid, stepping_symbol(p.grid, tau, p), b, g, 0.25 * tau**2)


def predictor_first_step(state0: SavState, tau: float, p: Problem) -> tuple[np.ndarray, np.ndarray, float]:
    """Half-step start-up values ``(ũ^{1/2}, ṽ^{1/2}, R̃^{1/2})``.

    With ``h = τ/2``, ``L = (-Δ)^{α/2}`` and ``b = F'(u⁰)/sqrt(E(u⁰))``,
    eliminating ṽ and R̃ gives

        [(1 + hγ₂) + (h²κ + hγ₁) L] w + (h²/2)(b, w) b
            = (1 + hγ₂ + hγ₁ L) u⁰ + h v⁰ - h² R⁰ b + (h²/2)(b, u⁰) b.
    """
    if state0.n != 0:
        raise ValueError(f"predictor needs the initial state, got step {state0.n}")
    grid = p.grid
    h = 0.5 * tau
    u0, v0, r0 = state0.u, state0.v, state0.R
    b = b_field(u0, p)
    lap = grid.symbol(p.alpha / 2)
    diag = (1.0 + h * p.gamma2) + (h * h * p.kappa + h * p.gamma1) * lap
    coef = 0.5 * h * h
    rhs = (
        (1.0 + h * p.gamma2) * u0
        + h * p.gamma1 * grid.apply_multiplier(u0, lap)
        + h * v0
        + (coef * grid.inner(b, u0) - h * h * r0) * b
    )
    w = solve_diag_rank1(grid, diag, b, rhs, coef)
    v_half = (w - u0) / h
    r_half = r0 + 0.5 * grid.inner(b, w - u0)
    return w, v_half, r_half


def sav_step(state: SavState, u_tilde: np.ndarray, tau: float, p: Problem) -> SavState:
    """Advance ``state`` by one step with the nonlinearity frozen at ``u_tilde``."""
    grid = p.grid
    b = b_field(u_tilde, p)
    lap = grid.symbol(p.alpha / 2)
    u, v, r = state.u, state.v, state.R
    coef = 0.25 * tau**2
    explicit = (2.0 + tau * p.gamma2) + (tau * p.gamma1 - 0.5 * tau**2 * p.kappa) * lap
    g = grid.apply_multiplier(u, explicit) + 2.0 * tau * v + (coef * grid.inner(b, u) - tau**2 * r) * b
    u_new = solve_diag_rank1(grid, stepping_symbol(grid, tau, p), b, g, coef)
    v_new = 2.0 * (u_new - u) / tau - v
    r_new = r + 0.5 * grid.inner(b, u_new - u)
    return SavState(n=state.n + 1, u=u_new, v=v_new, R=r_new, t=(state.n + 1) * tau, u_prev=u)


# -- residual contracts -----------------------------------------------------


def _relative(residual: float, scale: float) -> float:
    return residual / scale if scale > 0 else residual


def step_residuals(old: SavState, new: SavState, u_tilde: np.ndarray, tau: float, p: Problem) -> dict[str, float]:
    """Relative collocation residuals of the three step equations.

    Each residual is normalised by the sum of the max-norms of the terms it
    is made of, with difference quotients split into their operands. Since
    ``v^{n+1}`` is itself formed from ``(u^{n+1} - u^n)/τ``, its difference
    quotient is charged with the ``u`` magnitudes as well (a backward-error
    scale); otherwise round-off in ``u`` amplified by ``1/τ²`` dominates.
    """
    grid = p.grid
    e = energy_E(u_tilde, p)
    b = p.potential.dF(u_tilde) / math.sqrt(e)
    ubar = 0.5 * (new.u + old.u)
    vbar = 0.5 * (new.v + old.v)
    rbar = 0.5 * (new.R + old.R)
    nrm = lambda f: float(np.max(np.abs(f)))  # noqa: E731

    r_u = (new.u - old.u) / tau - vbar
    scale_u = (nrm(new.u) + nrm(old.u)) / abs(tau) + nrm(vbar)

    terms = [
        p.kappa * grid.frac_laplacian(ubar, p.alpha / 2),
        p.gamma1 * grid.frac_laplacian(vbar, p.alpha / 2),
        p.gamma2 * vbar,
        rbar * b,
    ]
    r_v = (new.v - old.v) / tau + sum(terms)
    scale_v = (
        (nrm(new.v) + nrm(old.v)) / abs(tau)
        + 2.0 * (nrm(new.u) + nrm(old.u)) / tau**2
        + sum(nrm(t) for t in terms)
    )

    du = grid.inner(p.potential.dF(u_tilde), new.u - old.u)
    r_r = (new.R - old.R) / tau - du / (2.0 * math.sqrt(e) * tau)
    scale_r = (abs(new.R) + abs(old.R)) / abs(tau) + abs(du) / (2.0 * math.sqrt(e) * abs(tau))

    return {
        "u": _relative(nrm(r_u), scale_u),
        "v": _relative(nrm(r_v), scale_v),
        "R": _relative(abs(r_r), scale_r),
    }


def predictor_residuals(
    state0: SavState, u_half: np.ndarray, v_half: np.ndarray, r_half: float, tau: float, p: Problem
) -> dict[str, float]:
    """Relative collocation residuals of the half-step start-up equations."""
    grid = p.grid
    h = 0.5 * tau
    e = energy_E(state0.u, p)
    dF0 = p.potential.dF(state0.u)
    b = dF0 / math.sqrt(e)
    nrm = lambda f: float(np.max(np.abs(f)))  # noqa: E731

    r_u = (u_half - state0.u) / h - v_half
    scale_u = (nrm(u_half) + nrm(state0.u)) / h + nrm(v_half)

    terms = [
        p.kappa * grid.frac_laplacian(u_half, p.alpha / 2),
        p.gamma1 * grid.frac_laplacian(v_half, p.alpha / 2),
        p.gamma2 * v_half,
        r_half * b,
    ]
    r_v = (v_half - state0.v) / h + sum(terms)
    scale_v = (
        (nrm(v_half) + nrm(state0.v)) / h
        + (nrm(u_half) + nrm(state0.u)) / h**2
        + sum(nrm(t) for t in terms)
    )

    du = grid.inner(dF0, (u_half - state0.u) / h)
    r_r = (r_half - state0.R) / h - du / (2.0 * math.sqrt(e))
    scale_r = (abs(r_half) + abs(state0.R)) / h + abs(du) / (2.0 * math.sqrt(e))

    return {
        "u": _relative(nrm(r_u), scale_u),
        "v": _relative(nrm(r_v), scale_v),
        "R": _relative(abs(r_r), scale_r),
    }


def _check(residuals: dict[str, float], where: str, tol: float = RESIDUAL_TOL) -> None:
    worst = max(residuals.values())
    if worst > tol:
        raise ResidualError(f"{where}: residuals {residuals} exceed {tol:g}")


# -- energy ledger ------------------------------------------------------------


def discrete_energy(state: SavState, p: Problem, dissipation_rhs: float = 0.0) -> EnergyRecord:
    grid = p.grid
    kinetic = 0.5 * grid.inner(state.v, state.v)
    fractional = 0.5 * p.kappa * grid.seminorm(state.u, p.alpha / 2) ** 2
    sav = state.R**2
    return EnergyRecord(
        n=state.n,
        t=state.t,
        H=kinetic + fractional + sav,
        kinetic=kinetic,
        fractional=fractional,
        sav=sav,
        dissipation_rhs=dissipation_rhs,
    )


def dissipation_identity_rhs(v_n: np.ndarray, v_np1: np.ndarray, tau: float, p: Problem) -> float:
    """Energy removed by damping over one step: ``τγ₁|v̄|²_{α/2} + τγ₂‖v̄‖²``."""
    if p.gamma1 == 0 and p.gamma2 == 0:
        return 0.0
    grid = p.grid
    vbar = 0.5 * (v_n + v_np1)
    out = 0.0
    if p.gamma1:
        out += tau * p.gamma1 * grid.seminorm(vbar, p.alpha / 2) ** 2
    if p.gamma2:
        out += tau * p.gamma2 * grid.inner(vbar, vbar)
    return out


# -- driver -------------------------------------------------------------------


def step_count(T: float, tau: float) -> int:
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    k = T / tau
    steps = round(k)
    if steps < 1 or abs(k - steps) > 1e-12 * max(1.0, k):
        raise NonIntegerStepCount(f"T/tau = {k!r} is not an integer")
    return steps


def start(p: Problem, which: Example | str = Example.EXAMPLE1, u0=None, v0=None) -> SavState:
    """Initial state from a preset, or from explicit ``u0``/``v0`` arrays."""
    if u0 is None:
        u0, v0_preset, _ = initial_state(which, p)
        v0 = v0_preset if v0 is None else v0
    u0 = np.array(p.grid.check(u0), dtype=float)
    v0 = np.zeros(p.grid.shape) if v0 is None else np.array(p.grid.check(v0), dtype=float)
    return SavState(n=0, u=u0, v=v0, R=math.sqrt(energy_E(u0, p)), t=0.0)


def iterate(state0: SavState, tau: float, steps: int, p: Problem, verify: bool = True):
    """Yield ``(state, dissipation_rhs)`` for ``n = 0 .. steps``."""
    state = replace(state0, R=math.sqrt(energy_E(state0.u, p)))
    yield state, 0.0
    u_half, v_half, r_half = predictor_first_step(state, tau, p)
    if verify:
        _check(predictor_residuals(state, u_half, v_half, r_half, tau, p), "start-up step")
    state = replace(state, u_half_pred=u_half)
    for _ in range(steps):
        if state.n == 0:
            u_tilde = state.u_half_pred
        else:
            u_tilde = extrapolate(state.u, state.u_prev)
        try:
            new = sav_step(state, u_tilde, tau, p)
        except ValueError as exc:
            raise type(exc)(f"step {state.n + 1}: {exc}") from exc
        if verify:
            _check(step_residuals(state, new, u_tilde, tau, p), f"step {new.n}")
        yield new, dissipation_identity_rhs(state.v, new.v, tau, p)
        state = new


def run(
    p: Problem,
    which: Example | str = Example.EXAMPLE1,
    tau: float | None = None,
    steps: int | None = None,
    state0: SavState | None = None,
    verify: bool = True,
) -> tuple[SavState, list[EnergyRecord]]:
    """Integrate to ``p.T`` and return the final state and the energy ledger.

    Exactly one of ``tau`` and ``steps`` is required.
    """
    if (tau is None) == (steps is None):
        raise ValueError("give exactly one of tau and steps")
    if tau is None:
        tau = p.T / steps
    steps = step_count(p.T, tau)
    if state0 is None:
        state0 = start(p, which)
    ledger = []
    state = state0
    for state, rhs in iterate(state0, tau, steps, p, verify=verify):
        ledger.append(discrete_energy(state, p, rhs))
    log.debug("run finished: %d steps, H %.6g -> %.6g", steps, ledger[0].H, ledger[-1].H)
    return state, ledger
