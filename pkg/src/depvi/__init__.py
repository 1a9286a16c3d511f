"""Discrete Euler-Poincare integrators for an underwater vehicle on SO(3) x R^3.

The rotational update is implicit in the body angular velocity and is
solved by Newton's method; the translational update and the advected
vertical are explicit. Two group difference maps are available, the
Cayley transform (``CAYLEY``) and the exponential map (``EXP``).
"""

from .group_maps import CAYLEY, EXP, DomainError, GroupDifferenceMap, get_map
from .newton import NonConvergence, SingularJacobian, SolverConfig, SolverError
from .simulation import (
    RunResult,
    RunSummary,
    SimulationError,
    convergence_study,
    kelvin_noether_quantity,
    run_discrete,
    run_rk4,
)
from .vehicle import ReducedState, VehicleParams, advance, default_initial_state, init_from_euler, total_energy

__all__ = [
    "CAYLEY",
    "EXP",
    "DomainError",
    "GroupDifferenceMap",
    "NonConvergence",
    "ReducedState",
    "RunResult",
    "RunSummary",
    "SimulationError",
    "SingularJacobian",
    "SolverConfig",
    "SolverError",
    "VehicleParams",
    "advance",
    "convergence_study",
    "default_initial_state",
    "get_map",
    "init_from_euler",
    "kelvin_noether_quantity",
    "run_discrete",
    "run_rk4",
    "total_energy",
]
