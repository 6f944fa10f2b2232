import math

import pytest

from capfin import Capfin, ValidationError
from capfin.solver import SolverConfig

from .conftest import CONF_DIR


def test_facade_channel_quantities():
    model = Capfin.from_file(str(CONF_DIR / "awgn.json"))
    assert model.budget == 1.0
    assert model.mutual_information([0.0]) == pytest.approx(0.0, abs=1e-8)
    cost = model.input_cost([-1.0, 1.0], [0.5, 0.5])
    assert cost.value == pytest.approx(1.0) and cost.feasible
    assert model.with_budget(4.0).budget == 4.0
    assert model.budget == 1.0


def test_facade_capacity_and_checks():
    model = Capfin.from_file(
        str(CONF_DIR / "awgn.json"), solver_config=SolverConfig(grid_min=-3.0, grid_max=3.0, grid_points=25)
    )
    result = model.capacity()
    assert 0.0 < result.capacity_estimate <= 0.5 * math.log(2.0) + 1e-9
    sweep = model.capacity_sweep([0.5, 1.0])
    assert sweep[0].capacity_estimate <= sweep[1].capacity_estimate + 1e-6
    assert all(b.holds for b in model.output_moment_battery(trials=5))
    assert model.check().overall


def test_facade_rejects_bad_json():
    with pytest.raises(ValidationError):
        Capfin.from_json('{"schema": 1}')
