"""Pseudo-spectral Galerkin simulator for shear-thickening second-grade fluids on the periodic box."""

from .constitutive import ConstitutiveLaw, derived_constants
from .grid import Grid, make_grid
from .stepper import Forcing, InitialCondition, SimParams, SimState, run

__version__ = "0.1.0"

__all__ = [
    "ConstitutiveLaw", "derived_constants", "Grid", "make_grid", "Forcing",
    "InitialCondition", "SimParams", "SimState", "run",
]
