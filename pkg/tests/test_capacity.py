import math

import numpy as np
import pytest

from capfin.channel.model import ChannelSpec, DiscreteInput, identity, mutual_information, signed_exp
from capfin.errors import BracketError, MonotonicityError, ValidationError
from capfin.numerics.densities import make_density
from capfin.numerics.moments import log_distortion, log_power, power
from capfin.solver import (
    SolverConfig,
    ba_solve_fixed_multiplier,
    build_kernel,
    capacity_vs_budget,
    level_grid,
    solve_capacity,
)
from capfin.solver.capacity import CapacityResult, check_budget_monotone


def test_level_grid_nests_and_widens():
    config = SolverConfig()
    g0 = level_grid(config, 0, math.inf)
    assert g0.size == 201 and g0[0] == -6.0 and g0[-1] == pytest.approx(6.0)
    g1 = level_grid(config, 1, math.inf)
    assert g1.size == 401
    assert np.allclose(np.diff(g1), 0.03)
    g1_wide = level_grid(config, 1, 10.0)
    assert g1_wide[0] <= -10.0 and g1_wide[-1] >= 10.0
    assert np.allclose(np.diff(g1_wide), 0.03)
    # coarse points sit on the fine lattice
    nearest = np.min(np.abs(g1_wide[None, :] - g0[:, None]), axis=1)
    assert np.all(nearest < 1e-9)


def test_kernel_rows_are_distributions(awgn):
    kernel = build_kernel(awgn, np.linspace(-3, 3, 31), SolverConfig())
    assert np.allclose(np.asarray(kernel.W.sum(axis=1)).ravel(), 1.0, atol=1e-12)
    assert kernel.n_clusters == 1
    assert kernel.costs[0] == pytest.approx(9.0)


def test_kernel_splits_far_outputs(gaussian):
    ch = ChannelSpec(signed_exp(), gaussian, power(2), log_power(2), budget=1.0)
    kernel = build_kernel(ch, np.array([-30.0, 0.0, 30.0]), SolverConfig())
    assert kernel.n_clusters == 3
    assert np.allclose(np.asarray(kernel.W.sum(axis=1)).ravel(), 1.0, atol=1e-12)


def test_kernel_rejects_bad_grids(awgn):
    with pytest.raises(ValidationError):
        build_kernel(awgn, np.array([1.0, 0.0]), SolverConfig())
    ch = ChannelSpec(signed_exp(), make_density("gaussian", [0.0, 1.0]), power(2), log_power(2), budget=1.0)
    with pytest.raises(ValidationError):
        build_kernel(ch, np.array([0.0, 1000.0]), SolverConfig())


def test_lagrangian_never_decreases(awgn):
    result = ba_solve_fixed_multiplier(awgn, np.linspace(-4, 4, 41), 0.3)
    trace = np.asarray(result.lagrangian_trace)
    assert np.all(np.diff(trace) >= -1e-12)
    assert result.weights.sum() == pytest.approx(1.0)
    assert result.duality_gap >= 0.0
    with pytest.raises(ValidationError):
        ba_solve_fixed_multiplier(awgn, [0.0, 1.0], -1.0)


def test_iteration_cap_is_flagged(awgn):
    result = ba_solve_fixed_multiplier(awgn, np.linspace(-4, 4, 41), 0.3, SolverConfig(ba_max_iter=2, ba_tol=1e-15))
    assert result.iteration_cap_reached
    assert result.iterations == 2


def test_separated_uniform_outputs_reach_log_k(uniform_channel):
    config = SolverConfig(grid_min=0.0, grid_max=7.0, grid_points=8)
    result = solve_capacity(uniform_channel, config)
    assert result.capacity_estimate == pytest.approx(math.log(8.0), abs=1e-6)
    assert result.continuous_estimate == pytest.approx(math.log(8.0), abs=1e-6)
    assert result.optimal_input.points.size == 8
    assert result.per_level_estimates == [result.capacity_estimate]
    assert not result.saturated
    doc = result.to_dict()
    assert doc["metadata"]["uniqueness"] == "uniqueness not assessed"
    assert doc["optimal_input"]["points"] == list(range(8))


def test_budget_is_met(awgn):
    result = solve_capacity(awgn, SolverConfig(grid_min=-4.0, grid_max=4.0, grid_points=41))
    assert result.achieved_cost <= awgn.budget + 1e-9
    assert result.achieved_cost == pytest.approx(awgn.budget, abs=1e-3)
    assert result.multiplier > 0.0
    assert result.capacity_estimate <= 0.5 * math.log(2.0) + 1e-9


def test_unreachable_budget_raises_bracket_error(gaussian):
    ch = ChannelSpec(identity(), gaussian, power(2), log_power(2), budget=1.0)
    with pytest.raises(BracketError) as info:
        solve_capacity(ch, SolverConfig(grid_min=5.0, grid_max=6.0, grid_points=3))
    assert info.value.cost_hi >= 25.0


def test_capacity_grows_with_budget(awgn):
    config = SolverConfig(grid_min=-4.0, grid_max=4.0, grid_points=41)
    results = capacity_vs_budget(awgn, [0.5, 1.0, 2.0], config)
    estimates = [r.capacity_estimate for r in results]
    assert estimates == sorted(estimates)
    assert [r.budget for r in results] == [0.5, 1.0, 2.0]
    check_budget_monotone(results)


def _result_at(budget, estimate):
    return CapacityResult(
        capacity_estimate=estimate,
        optimal_input=DiscreteInput.point_mass(0.0),
        multiplier=0.0,
        achieved_cost=0.0,
        budget=budget,
        iterations=1,
        per_level_estimates=[estimate],
        saturated=True,
    )


def test_capacity_falling_with_budget_is_rejected():
    flat = [_result_at(1.0, 0.3), _result_at(2.0, 0.3 - 5e-7), _result_at(2.0, 0.4)]
    check_budget_monotone(flat)
    falling = [_result_at(1.0, 0.3), _result_at(2.0, 0.5), _result_at(4.0, 0.45)]
    with pytest.raises(MonotonicityError, match="decreased") as info:
        check_budget_monotone(falling)
    assert [r.budget for r in info.value.result] == [1.0, 2.0, 4.0]


def test_budget_sweep_validation(awgn):
    with pytest.raises(ValidationError):
        capacity_vs_budget(awgn, [2.0, 1.0])
    with pytest.raises(ValidationError):
        capacity_vs_budget(awgn, [])


@pytest.mark.slow
@pytest.mark.parametrize("budget,grid", [(1.0, (-6.0, 6.0, 201)), (10.0, (-12.0, 12.0, 401))])
def test_gaussian_channel_capacity(awgn, budget, grid):
    lo, hi, n = grid
    result = solve_capacity(awgn.with_budget(budget), SolverConfig(grid_min=lo, grid_max=hi, grid_points=n))
    expected = 0.5 * math.log1p(budget)
    assert result.capacity_estimate == pytest.approx(expected, abs=0.02)
    assert result.continuous_estimate == pytest.approx(result.capacity_estimate, abs=0.01)
    assert result.continuous_estimate == pytest.approx(
        mutual_information(awgn, result.optimal_input), abs=1e-9
    )


@pytest.mark.slow
def test_superlog_cost_saturates_under_refinement(gaussian):
    ch = ChannelSpec(signed_exp(), gaussian, power(2), log_power(2), budget=1.0)
    config = SolverConfig(grid_min=-8.0, grid_max=8.0, grid_points=201, refinement_levels=3, tightness_epsilon=0.1)
    result = solve_capacity(ch, config)
    assert len(result.per_level_estimates) == 3
    assert abs(result.per_level_estimates[-1] - result.per_level_estimates[-2]) < 0.01
    assert result.saturated


@pytest.mark.slow
def test_log_distortion_cost_keeps_growing(gaussian):
    f = signed_exp()
    ch = ChannelSpec(f, gaussian, log_distortion(f.eval), log_power(2), budget=4.0)
    config = SolverConfig(grid_min=-12.0, grid_max=12.0, grid_points=201, refinement_levels=3, tightness_epsilon=0.5)
    result = solve_capacity(ch, config)
    levels = result.per_level_estimates
    assert levels[0] < levels[1] < levels[2]
    assert levels[2] - levels[1] > 0.05
    assert not result.saturated
