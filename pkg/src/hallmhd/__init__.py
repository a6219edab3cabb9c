"""Pseudospectral experiments for the incompressible resistive Hall-MHD system."""

from .diagnostics import DiagnosticsRecord, energy_budget, functional_A, functional_X, record
from .experiments import ScenarioConfig, Verdict, make_initial, run_scenario
from .model import PhysParams, State, assemble_rhs, hall_term
from .spectral import Grid, get_grid
from .timestepper import InstabilityError, StepControl, stable_dt, step

__all__ = [
    "DiagnosticsRecord", "Grid", "InstabilityError", "PhysParams", "ScenarioConfig", "State",
    "StepControl", "Verdict", "assemble_rhs", "energy_budget", "functional_A", "functional_X",
    "get_grid", "hall_term", "make_initial", "record", "run_scenario", "stable_dt", "step",
]

__version__ = "0.1.0"
