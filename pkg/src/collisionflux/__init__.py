"""Collision-model simulation of heat transport through a three-qubit chain
coupled to a hierarchically structured environment."""

__version__ = "0.1.0"

from .engine import (
    CollisionRecord,
    RegisterState,
    SteadyStateCriterion,
    Trajectory,
    collision_round,
    energy_balance,
    run,
)
from .errors import ConfigError, NumericalIntegrityError, PreconditionError
from .model import ModelConfig, build_hamiltonians, build_unitaries, hse_ancilla, thermal_qubit
from .spectrum import spectrum_report, system_spectrum
from .sweep import Axis, SweepGrid, SweepSpec, run_sweep
