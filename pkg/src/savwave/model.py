"""Problem definition: coefficients, potentials, shifted energy, presets."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import Grid, make_grid


class NonpositiveEnergy(ValueError):
    """Raised when ``∫F(u) + c0 <= 0``, i.e. ``c0`` is too small for the state."""


class Potential(str, enum.Enum):
    SINE_GORDON = "sine_gordon"
    DOUBLE_WELL = "double_well"

    def F(self, u: np.ndarray) -> np.ndarray:
        if self is Potential.SINE_GORDON:
            return 1.0 - np.cos(u)
        u2 = u * u
        return u2 * (0.25 * u2 - 0.5)

    def dF(self, u: np.ndarray) -> np.ndarray:
        if self is Potential.SINE_GORDON:
            return np.sin(u)
        return u * u * u - u

    @property
    def lower_bound(self) -> float:
        """Pointwise infimum of ``F``."""
        return 0.0 if self is Potential.SINE_GORDON else -0.25


class Example(str, enum.Enum):
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    # u0 = v0 = 0; handy as an equilibrium check
    ZERO = "zero"

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        if self is Example.EXAMPLE2:
            return (-10.0, 10.0, -10.0, 10.0)
        return (-16.0, 16.0, -16.0, 16.0)

    @property
    def potential(self) -> Potential:
        return Potential.DOUBLE_WELL if self is Example.EXAMPLE2 else Potential.SINE_GORDON

    @property
    def final_time(self) -> float:
        return 8.0 if self is Example.EXAMPLE2 else 1.0


def default_c0(potential: Potential, grid: Grid) -> float:
    """Smallest round constant that keeps ``E(u) > 0`` for every ``u``."""
    if potential is Potential.SINE_GORDON:
        return 1.0
    return 1.0 + grid.area / 4.0


@dataclass(frozen=True)
class Problem:
    grid: Grid
    alpha: float = 1.2
    kappa: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    potential: Potential = Potential.SINE_GORDON
    c0: float | None = None
    T: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (1,2], got {self.alpha}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError(f"gamma1, gamma2 must be non-negative, got {self.gamma1}, {self.gamma2}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        object.__setattr__(self, "potential", Potential(self.potential))
        if self.c0 is None:
            object.__setattr__(self, "c0", default_c0(self.potential, self.grid))
        if not self.c0 > 0:
            raise ValueError(f"c0 must be positive, got {self.c0}")


def example_problem(which: Example | str, nx: int, **overrides) -> Problem:
    """Problem on the preset domain of ``which`` with its potential and final time."""
    which = Example(which)
    params = dict(potential=which.potential, T=which.final_time)
    params.update(overrides)
    return Problem(grid=make_grid(nx, which.bounds), **params)


def energy_E(u: np.ndarray, p: Problem) -> float:
    """Shifted nonlinear energy ``∫F(u) dx + c0``."""
    energy = p.grid.hx * p.grid.hy * float(np.sum(p.potential.F(p.grid.check(u)))) + p.c0
    if not energy > 0:
        raise NonpositiveEnergy(f"E(u) = {energy:.6g} <= 0; increase c0 (currently {p.c0})")
    return energy


def b_field(u_tilde: np.ndarray, p: Problem) -> np.ndarray:
    return p.potential.dF(u_tilde) / np.sqrt(energy_E(u_tilde, p))


def initial_state(which: Example | str, p: Problem) -> tuple[np.ndarray, np.ndarray, float]:
    """Sampled ``(u0, v0, R0)`` for a preset; ``R0 = sqrt(E(u0))``."""
    which = Example(which)
    grid = p.grid
    if which is not Example.ZERO and grid.bounds != which.bounds:
        warnings.warn(
            f"{which.value} is posed on {which.bounds}, grid has {grid.bounds}",
            stacklevel=2,
        )
    x, y = grid.mesh()
    if which is Example.EXAMPLE1:
        u0 = np.sin(np.pi * x / 16) * np.cos(np.pi * y / 16)
    elif which is Example.EXAMPLE2:
        u0 = 0.5 * np.arctan(np.exp(-np.sqrt(x**2 + y**2)))
    else:
        u0 = np.zeros(grid.shape)
    v0 = np.zeros(grid.shape)
    return u0, v0, float(np.sqrt(energy_E(u0, p)))
