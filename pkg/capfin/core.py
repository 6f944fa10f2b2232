import os
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .channel.conditions import (
    DiagnosticsConfig,
    OutputMomentBound,
    TripletReport,
    check_conditions,
    random_feasible_inputs,
    verify_output_moment_bound,
)
from .channel.model import ChannelSpec, CostEvaluation, DiscreteInput, input_cost, mutual_information
from .channel.spec import ChannelSpecModel, load_channel_spec, parse_channel_spec
from .numerics.quadrature import QuadratureConfig
from .solver.capacity import CapacityResult, capacity_vs_budget, solve_capacity
from .solver.config import SolverConfig
from .solver.tracker import NullTracker, SolverTracker


class Capfin:
    def __init__(
        self,
        spec: ChannelSpecModel,
        quadrature: Optional[QuadratureConfig] = None,
        solver_config: Optional[SolverConfig] = None,
        tracker: Optional[SolverTracker] = None,
    ):
        """Analysis front end for one additive-noise channel.

        Args:
            spec: Validated JSON channel description (distortion, noise, cost,
                noise moment, budget).
            quadrature: Tolerances used for every integral. Defaults to the
                solver config's quadrature settings.
            solver_config: Grid, Blahut-Arimoto and bisection settings for
                capacity estimation.
            tracker: Receives status lines and per-level metrics. Silent if None.
        """
        self.spec = spec
        self.solver_config = solver_config or SolverConfig()
        self.quadrature = quadrature or self.solver_config.quadrature
        self.tracker = tracker or NullTracker()
        self.channel: ChannelSpec = spec.build(self.quadrature)

    @classmethod
    def from_file(
        cls,
        path: str,
        quadrature: Optional[QuadratureConfig] = None,
        solver_config: Optional[SolverConfig] = None,
        tracker: Optional[SolverTracker] = None,
    ):
        """Load a channel spec from a JSON file.

        Raises:
            ValidationError: the file is missing, is not JSON, or fails the schema.
        """
        if tracker is not None:
            tracker.print(f"channel spec: {os.path.abspath(path)}")
        return cls(load_channel_spec(path), quadrature, solver_config, tracker)

    @classmethod
    def from_json(cls, text: str, **kwargs):
        return cls(parse_channel_spec(text), **kwargs)

    @property
    def budget(self) -> float:
        return self.channel.budget

    def with_budget(self, budget: float) -> "Capfin":
        spec = self.spec.model_copy(update={"budget": float(budget)})
        return Capfin(spec, self.quadrature, self.solver_config, self.tracker)

    # ------------------------------------------------------------------ #
    # Channel quantities
    # ------------------------------------------------------------------ #
    def make_input(self, points: Sequence[float], weights: Optional[Sequence[float]] = None) -> DiscreteInput:
        if weights is None:
            return DiscreteInput.uniform(points)
        return DiscreteInput.from_pairs(points, weights)

    def mutual_information(self, points: Sequence[float], weights: Optional[Sequence[float]] = None) -> float:
        return mutual_information(self.channel, self.make_input(points, weights), self.quadrature)

    def input_cost(self, points: Sequence[float], weights: Optional[Sequence[float]] = None) -> CostEvaluation:
        return input_cost(self.channel, self.make_input(points, weights))

    # ------------------------------------------------------------------ #
    # Capacity
    # ------------------------------------------------------------------ #
    def capacity(self, budget: Optional[float] = None) -> CapacityResult:
        ch = self.channel if budget is None else self.channel.with_budget(budget)
        cfg = self.solver_config
        self.tracker.print(
            f"Solving capacity: budget={ch.budget!r}, grid=[{cfg.grid_min}, {cfg.grid_max}] x {cfg.grid_points}, "
            f"levels={cfg.refinement_levels}"
        )
        return solve_capacity(ch, self.solver_config, self.tracker)

    def capacity_sweep(self, budgets: Sequence[float]) -> List[CapacityResult]:
        return capacity_vs_budget(self.channel, budgets, self.solver_config, self.tracker)

    # ------------------------------------------------------------------ #
    # Sufficient conditions
    # ------------------------------------------------------------------ #
    def check(self, diagnostics: Optional[DiagnosticsConfig] = None) -> TripletReport:
        diagnostics = diagnostics or DiagnosticsConfig(quadrature=self.quadrature)
        return check_conditions(self.channel, diagnostics)

    def output_moment_battery(self, trials: int = 20, seed: int = 0) -> List[OutputMomentBound]:
        """Check ``E_Y[cmin(|Y|/2)] <= L_N + A`` on random feasible inputs."""
        rng = np.random.default_rng(seed)
        inputs = random_feasible_inputs(self.channel, trials, rng)
        return [
            verify_output_moment_bound(self.channel, F, self.quadrature)
            for F in tqdm(inputs, desc="battery", disable=self.tracker.quiet, leave=False)
        ]
