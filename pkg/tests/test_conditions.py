import math

import numpy as np
import pytest

from capfin.channel.conditions import (
    ConditionStatus,
    DiagnosticsConfig,
    check_conditions,
    cmin_construct,
    random_feasible_inputs,
    verify_output_moment_bound,
    z_of_y,
)
from capfin.channel.model import ChannelSpec, custom, expr_table, identity, input_cost, signed_exp
from capfin.channel.spec import load_channel_spec
from capfin.errors import ValidationError
from capfin.numerics.densities import make_density
from capfin.numerics.moments import log_power, power

from .conftest import CONF_DIR


def test_z_of_y_uses_closed_form_inverse():
    assert z_of_y(identity(), 3.0) == 3.0
    assert z_of_y(signed_exp(), math.expm1(2.0)) == pytest.approx(2.0, rel=1e-14)


def test_z_of_y_takes_right_end_of_plateau():
    f = expr_table([(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 2.0)])
    assert z_of_y(f, 1.0) == pytest.approx(2.0, abs=1e-9)
    assert z_of_y(f, 0.5) == pytest.approx(0.5, abs=1e-9)


def test_z_of_y_below_f_at_zero():
    f = custom("square_plus_one", lambda x: np.asarray(x, dtype=float) ** 2 + 1.0)
    assert z_of_y(f, 5.0) == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(ValidationError):
        z_of_y(f, 0.5)


def test_cmin_construction(awgn):
    c = cmin_construct(awgn)
    assert c.L == pytest.approx(awgn.L_N + awgn.budget)
    assert c.cmin.eval(1.0) == pytest.approx(math.log(2.0) ** 2)
    assert c.cmin.eval(0.1) == pytest.approx(min(0.01, math.log1p(0.1) ** 2))
    assert c.l.eval(2.0) == pytest.approx(c.cmin.eval(1.0))
    assert np.allclose(c.cmin.eval(np.array([1.0, 0.1])), [c.cmin.eval(1.0), c.cmin.eval(0.1)])


def test_random_inputs_are_feasible(awgn):
    inputs = random_feasible_inputs(awgn, 10, np.random.default_rng(3))
    assert len(inputs) == 10
    assert all(input_cost(awgn, F).feasible for F in inputs)


@pytest.mark.parametrize("name", ["awgn", "exp_channel"])
def test_output_moment_bound_battery(request, name):
    ch = request.getfixturevalue(name)
    for F in random_feasible_inputs(ch, 20, np.random.default_rng(0)):
        bound = verify_output_moment_bound(ch, F)
        assert bound.holds, (F.to_dict(), bound)


def test_awgn_conditions_all_hold(awgn):
    report = check_conditions(awgn)
    assert report.entries["A1"].status is ConditionStatus.declared
    for name in ("A2", "A3", "A4", "A5", "A6", "A7", "A8"):
        assert report.entries[name].status is ConditionStatus.verified, name
    assert report.overall
    assert report.L_N == pytest.approx(awgn.L_N)
    doc = report.to_dict()
    assert list(doc["conditions"]) == ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"]
    assert doc["conditions"]["A3"]["status"] == "verified-on-grid"


def test_logarithmic_cost_violates_growth_condition():
    ch = load_channel_spec(CONF_DIR / "bad.json").build()
    report = check_conditions(ch)
    assert report.entries["A3"].status is ConditionStatus.violated
    assert report.entries["A2"].status is ConditionStatus.verified
    assert not report.overall


def test_cost_of_log_distortion_violates_growth_condition():
    ch = load_channel_spec(CONF_DIR / "control.json").build()
    assert check_conditions(ch).entries["A3"].status is ConditionStatus.violated


def test_uniform_noise_is_piecewise_continuous(uniform_channel):
    report = check_conditions(uniform_channel.with_cost(power(2)))
    a6 = report.entries["A6"]
    assert a6.status is ConditionStatus.verified
    assert any("piecewise continuous" in note for note in a6.notes)
    assert report.entries["A7"].status is ConditionStatus.verified


def test_jump_in_distortion_is_detected(gaussian):
    f = expr_table([(0.0, 1.0), (1.0, 2.0)])
    ch = ChannelSpec(f, gaussian, power(2), log_power(2), budget=1.0)
    assert check_conditions(ch).entries["A4"].status is ConditionStatus.violated


def test_heavy_noise_with_power_moment_fails_noise_condition():
    ch = ChannelSpec(identity(), make_density("cauchy", [0.0, 1.0]), power(2), power(2), budget=1.0)
    report = check_conditions(ch, DiagnosticsConfig(grid_points=257, refinement_levels=2))
    assert report.entries["A8"].status is ConditionStatus.violated
    assert report.L_N is None
    assert report.to_dict()["overall"] is False
