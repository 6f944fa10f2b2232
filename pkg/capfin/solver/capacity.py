"""
Cost-constrained capacity estimation.

``solve_capacity`` runs, per refinement level, an outer bisection on the
Lagrange multiplier around :func:`run_ba` until the achieved cost meets the
budget, then refines the input grid (half the spacing, range widened to the
Markov tightness bound ``K_eps``) and compares the last two levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from ..channel.model import ChannelSpec, DiscreteInput, mutual_information
from ..errors import BracketError, CapfinError, MonotonicityError, ValidationError
from ..numerics.moments import markov_tightness_bound
from .blahut_arimoto import BAResult, DiscreteKernel, build_kernel, run_ba
from .config import SolverConfig
from .tracker import NullTracker, SolverTracker

MULTIPLIER_CEILING = 2.0**30
BUDGET_MONOTONE_SLACK = 1e-6
_MAX_BISECTION_STEPS = 200


@dataclass
class CapacityResult:
    capacity_estimate: float
    optimal_input: DiscreteInput
    multiplier: float
    achieved_cost: float
    budget: float
    iterations: int
    per_level_estimates: List[float]
    saturated: bool
    continuous_estimate: Optional[float] = None
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "capacity_estimate": self.capacity_estimate,
            "continuous_estimate": self.continuous_estimate,
            "budget": self.budget,
            "achieved_cost": self.achieved_cost,
            "multiplier": self.multiplier,
            "iterations": self.iterations,
            "per_level_estimates": list(self.per_level_estimates),
            "saturated": self.saturated,
            "optimal_input": self.optimal_input.to_dict(),
            "metadata": dict(self.metadata),
        }


def level_grid(config: SolverConfig, level: int, k_eps: float) -> np.ndarray:
    """Input grid of a refinement level.

    Level 0 is ``linspace(grid_min, grid_max, grid_points)``. Every further level
    halves the spacing on the same lattice and extends the range by whole cells
    until it covers ``[-k_eps, k_eps]``.
    """
    spacing = (config.grid_max - config.grid_min) / (config.grid_points - 1) / 2**level
    lo, hi = config.grid_min, config.grid_max
    if level > 0 and math.isfinite(k_eps):
        lo -= math.ceil(max(0.0, lo - (-k_eps)) / spacing) * spacing
        hi += math.ceil(max(0.0, k_eps - hi) / spacing) * spacing
    n = int(round((hi - lo) / spacing)) + 1
    return lo + spacing * np.arange(n)


def _solve_level(
    kernel: DiscreteKernel, budget: float, config: SolverConfig, tracker: SolverTracker
) -> tuple[BAResult, int]:
    """Bisection on the multiplier; returns the feasible-side result and the BA iteration count."""
    total = 0

    def solve(s: float, init=None) -> BAResult:
        nonlocal total
        res = run_ba(kernel, s, config, init)
        total += res.iterations
        if res.iteration_cap_reached:
            tracker.print(f"[ba] iteration cap reached at s={s:.6g} (gap {res.duality_gap:.3e})")
        return res

    s_lo = config.multiplier_lo
    res_lo = solve(s_lo)
    if res_lo.cost <= budget + config.bisection_tol:
        return res_lo, total

    s_hi = config.multiplier_hi
    res_hi = solve(s_hi, res_lo.weights)
    while res_hi.cost > budget:
        if s_hi >= MULTIPLIER_CEILING:
            raise BracketError(
                f"cost stays above the budget {budget!r} up to multiplier {s_hi!r}",
                cost_lo=res_lo.cost,
                cost_hi=res_hi.cost,
            )
        s_lo, res_lo = s_hi, res_hi
        s_hi *= 2.0
        res_hi = solve(s_hi, res_lo.weights)

    for _ in range(_MAX_BISECTION_STEPS):
        if budget - res_hi.cost <= config.bisection_tol or s_hi - s_lo <= 1e-12 * max(1.0, s_hi):
            break
        mid = 0.5 * (s_lo + s_hi)
        res_mid = solve(mid, res_hi.weights)
        if res_mid.cost > budget:
            s_lo, res_lo = mid, res_mid
        else:
            s_hi, res_hi = mid, res_mid
    return res_hi, total


def solve_capacity(
    ch: ChannelSpec,
    config: SolverConfig | None = None,
    tracker: SolverTracker | None = None,
) -> CapacityResult:
    """Estimate ``sup { I(F) : E_F[C(|X|)] <= A }`` over discrete inputs.

    Raises:
        BracketError: the cost exceeds the budget even at the multiplier ceiling.
    """
    config = config or SolverConfig()
    tracker = tracker or NullTracker()
    try:
        k_eps = markov_tightness_bound(ch.cost, ch.budget, config.tightness_epsilon)
    except ValidationError:
        k_eps = math.inf

    per_level: List[float] = []
    iterations = 0
    best: Optional[BAResult] = None
    kernel: Optional[DiscreteKernel] = None
    levels = range(config.refinement_levels)
    bar = tqdm(levels, desc="refinement", disable=tracker.quiet or config.refinement_levels == 1, leave=False)
    for level in bar:
        grid = level_grid(config, level, k_eps)
        kernel = build_kernel(ch, grid, config)
        best, used = _solve_level(kernel, ch.budget, config, tracker)
        iterations += used
        per_level.append(best.mutual_information)
        tracker.step += 1
        tracker.log_metrics(
            {
                "level": level,
                "grid_points": int(grid.size),
                "clusters": kernel.n_clusters,
                "estimate": best.mutual_information,
                "cost": best.cost,
                "multiplier": best.multiplier,
                "duality_gap": best.duality_gap,
            },
            split="capacity",
        )

    assert best is not None and kernel is not None
    keep = best.weights > config.prune_tol
    optimal = DiscreteInput(kernel.grid[keep], best.weights[keep] / best.weights[keep].sum())
    saturated = len(per_level) >= 2 and abs(per_level[-1] - per_level[-2]) < config.saturation_threshold

    continuous = None
    metadata: Dict[str, object] = {
        "uniqueness": "uniqueness not assessed",
        "k_eps": k_eps if math.isfinite(k_eps) else None,
        "grid_points_final": int(kernel.grid.size),
        "clusters_final": kernel.n_clusters,
        "duality_gap": best.duality_gap,
        "iteration_cap_reached": best.iteration_cap_reached,
    }
    if config.evaluate_continuous:
        try:
            continuous = mutual_information(ch, optimal, config.quadrature)
        except CapfinError as exc:
            metadata["continuous_estimate_error"] = str(exc)

    tracker.done("capacity", f"estimate {best.mutual_information:.6f} nats at budget {ch.budget!r}")
    return CapacityResult(
        capacity_estimate=best.mutual_information,
        optimal_input=optimal,
        multiplier=best.multiplier,
        achieved_cost=best.cost,
        budget=ch.budget,
        iterations=iterations,
        per_level_estimates=per_level,
        saturated=saturated,
        continuous_estimate=continuous,
        metadata=metadata,
    )


def capacity_vs_budget(
    ch: ChannelSpec,
    budgets: Sequence[float],
    config: SolverConfig | None = None,
    tracker: SolverTracker | None = None,
) -> List[CapacityResult]:
    """One :func:`solve_capacity` per budget; budgets must be non-decreasing, and so must the estimates."""
    budgets = [float(b) for b in budgets]
    if not budgets:
        raise ValidationError("at least one budget is required")
    if any(b2 < b1 for b1, b2 in zip(budgets[:-1], budgets[1:])):
        raise ValidationError("budgets must be non-decreasing")
    tracker = tracker or NullTracker()
    results: List[CapacityResult] = []
    for budget in tqdm(budgets, desc="budgets", disable=tracker.quiet, leave=False):
        results.append(solve_capacity(ch.with_budget(budget), config, tracker))
    check_budget_monotone(results)
    return results


def check_budget_monotone(results: Sequence[CapacityResult]) -> None:
    """Raise :class:`MonotonicityError` when an estimate drops as the budget grows.

    A larger budget admits every input a smaller one does, so a drop beyond
    ``BUDGET_MONOTONE_SLACK`` means one of the solves is not trustworthy. The
    error carries the full list in ``result``.
    """
    for prev, cur in zip(results[:-1], results[1:]):
        if cur.budget >= prev.budget and cur.capacity_estimate < prev.capacity_estimate - BUDGET_MONOTONE_SLACK:
            raise MonotonicityError(
                f"capacity estimate decreased from {prev.capacity_estimate!r} to {cur.capacity_estimate!r} "
                f"between budgets {prev.budget!r} and {cur.budget!r}",
                result=list(results),
            )
