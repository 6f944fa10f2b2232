import math

import pytest

from capfin.errors import MomentNotFiniteError, ValidationError
from capfin.numerics.densities import make_density
from capfin.numerics.moments import (
    MomentFunction,
    log1p_square,
    log_distortion,
    log_power,
    markov_tightness_bound,
    moment_function_from_config,
    moment_functional,
    power,
    rescale_moment_function,
    sqrt,
    superlog_diagnostic,
    tail_mass,
    zero,
)


def test_cauchy_log_moment():
    value = moment_functional(make_density("cauchy", [0.0, 1.0]), log1p_square())
    assert value == pytest.approx(math.log(4.0), abs=1e-6)


def test_gaussian_second_moment():
    assert moment_functional(make_density("gaussian", [0.0, 1.0]), power(2)) == pytest.approx(1.0, abs=1e-9)
    assert moment_functional(make_density("uniform", [0.0, 1.0]), power(2)) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_diverging_moment_raises():
    with pytest.raises(MomentNotFiniteError):
        moment_functional(make_density("cauchy", [0.0, 1.0]), power(2))


def test_zero_moment():
    assert moment_functional(make_density("cauchy", [0.0, 1.0]), zero()) == 0.0


@pytest.mark.parametrize(
    "l,expected",
    [
        (log_power(2), True),
        (log_power(3), True),
        (sqrt(), True),
        (power(2), True),
        (log_power(1), False),
        (log1p_square(), False),
    ],
)
def test_superlog_diagnostic(l, expected):
    report = superlog_diagnostic(l)
    assert report.dominated_for_all is expected
    assert report.grid_points > 0
    assert len(report.to_dict()["dominated_from"]) == len(report.kappa_grid)


def test_superlog_diagnostic_rejects_small_range():
    with pytest.raises(ValidationError):
        superlog_diagnostic(power(2), y_max=2.0)
    with pytest.raises(ValidationError):
        superlog_diagnostic(power(2), kappa_grid=())


def test_markov_bound_closed_form():
    assert markov_tightness_bound(power(2), A=1.0, epsilon=0.1) == pytest.approx(math.sqrt(10.0) + 1.0)


def test_markov_bound_by_bisection():
    cost = log_distortion(lambda x: x)
    K = markov_tightness_bound(cost, A=2.0, epsilon=0.5)
    assert K == pytest.approx(math.expm1(4.0) + 1.0, rel=1e-9)


def test_markov_bound_never_stops_below_the_target():
    short = MomentFunction(name="abs", eval=lambda y: abs(y), inverse=lambda v: math.nextafter(v, 0.0))
    K = markov_tightness_bound(short, A=2.0, epsilon=0.5)
    assert K == 5.0
    assert short.eval(K - 1.0) >= 4.0

    wrong = MomentFunction(name="abs", eval=lambda y: abs(y), inverse=lambda v: v / 2.0)
    K = markov_tightness_bound(wrong, A=2.0, epsilon=0.5)
    assert wrong.eval(K - 1.0) >= 4.0
    assert K == pytest.approx(5.0, rel=1e-12)


def test_markov_bound_validation():
    with pytest.raises(ValidationError):
        markov_tightness_bound(power(2), A=0.0, epsilon=0.1)
    with pytest.raises(ValidationError):
        markov_tightness_bound(power(2), A=1.0, epsilon=0.0)
    with pytest.raises(ValidationError):
        markov_tightness_bound(zero(), A=1.0, epsilon=0.5)


def test_tail_mass():
    g = make_density("gaussian", [0.0, 1.0])
    assert tail_mass(g, 1.959963984540054) == pytest.approx(0.05, abs=1e-12)


def test_rescaled_moment_function():
    l = rescale_moment_function(power(2), 2.0)
    assert float(l.eval(4.0)) == pytest.approx(4.0)
    assert l.inverse(4.0) == pytest.approx(4.0)
    assert rescale_moment_function(power(2), 1.0).name == "power"


def test_moment_function_from_config():
    assert moment_function_from_config({"kind": "log_power", "p": 2}).params == (2.0,)
    assert moment_function_from_config({"kind": "sqrt"}).name == "sqrt"
    with pytest.raises(ValidationError):
        moment_function_from_config({"kind": "power"})
    with pytest.raises(ValidationError):
        moment_function_from_config({"kind": "cube-root"})
    with pytest.raises(ValidationError):
        moment_function_from_config({"kind": "log_distortion"})
