"""Linearly implicit SAV Fourier-spectral solver for the damped fractional wave equation."""

from .model import Example, NonpositiveEnergy, Potential, Problem, energy_E, example_problem, initial_state
from .spectral import Grid, apply_A_inverse, linf_norm, make_grid
from .stepper import (
    EnergyRecord,
    NonIntegerStepCount,
    SavState,
    discrete_energy,
    predictor_first_step,
    rank1_solve,
    run,
    sav_step,
)

__all__ = [
    "EnergyRecord",
    "Example",
    "Grid",
    "NonIntegerStepCount",
    "NonpositiveEnergy",
    "Potential",
    "Problem",
    "SavState",
    "apply_A_inverse",
    "discrete_energy",
    "energy_E",
    "example_problem",
    "initial_state",
    "linf_norm",
    "make_grid",
    "predictor_first_step",
    "rank1_solve",
    "run",
    "sav_step",
]
