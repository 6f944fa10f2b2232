"""
Capacity solver: discretized Blahut-Arimoto with a cost multiplier, outer
bisection to meet the budget, and grid refinement with a saturation check.
"""

from .blahut_arimoto import BAResult, DiscreteKernel, ba_solve_fixed_multiplier, build_kernel
from .capacity import CapacityResult, capacity_vs_budget, level_grid, solve_capacity
from .config import SolverConfig, load_yaml_config
from .tracker import NullTracker, SolverTracker

__all__ = [
    "BAResult",
    "CapacityResult",
    "DiscreteKernel",
    "NullTracker",
    "SolverConfig",
    "SolverTracker",
    "ba_solve_fixed_multiplier",
    "build_kernel",
    "capacity_vs_budget",
    "level_grid",
    "load_yaml_config",
    "solve_capacity",
]
