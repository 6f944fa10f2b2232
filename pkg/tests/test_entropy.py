import math

import numpy as np
import pytest

from capfin.errors import MonotonicityError, ValidationError
from capfin.numerics.densities import make_density
from capfin.numerics.entropy import (
    TailBoundInputs,
    differential_entropy,
    discrete_entropy,
    entropy_integrand_bound_holds,
    kl_divergence,
    rescale_to_unit_sup,
    tail_entropy,
    tail_entropy_bound,
    to_bits,
)
from capfin.numerics.moments import log1p_square, log_power, moment_functional, sqrt


@pytest.mark.parametrize(
    "family,params",
    [
        ("gaussian", [0.0, 1.0]),
        ("gaussian", [0.0, 0.1]),
        ("cauchy", [0.0, 1.0]),
        ("uniform", [0.0, 2.0]),
        ("pareto", [3.0, 1.0]),
        ("gamma", [2.0, 1.0]),
        ("gennorm", [0.0, 1.0, 1.5]),
        ("student_t", [3.0, 0.0, 1.0]),
    ],
)
def test_quadrature_entropy_matches_closed_form(family, params):
    p = make_density(family, params)
    assert differential_entropy(p) == pytest.approx(p.analytic_entropy, abs=1e-7)


def test_standard_values():
    assert differential_entropy(make_density("gaussian", [0.0, 1.0])) == pytest.approx(
        0.5 * math.log(2 * math.pi * math.e), abs=1e-9
    )
    assert differential_entropy(make_density("cauchy", [0.0, 1.0])) == pytest.approx(math.log(4 * math.pi), abs=1e-8)
    assert differential_entropy(make_density("uniform", [0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)


def test_rescale_to_unit_sup():
    p = make_density("gaussian", [0.0, 0.1])
    z, shift = rescale_to_unit_sup(p)
    assert z.sup_bound == pytest.approx(1.0, abs=1e-15)
    assert shift == pytest.approx(math.log(p.sup_bound))
    assert differential_entropy(z) == pytest.approx(differential_entropy(p) + shift, abs=1e-9)
    wide = make_density("gaussian", [0.0, 2.0])
    same, zero_shift = rescale_to_unit_sup(wide)
    assert same is wide and zero_shift == 0.0


@pytest.mark.parametrize("family,params", [("gaussian", [0.0, 0.1]), ("cauchy", [0.0, 0.1])])
def test_tail_bound_dominates_rescaled_tail(family, params):
    z, _ = rescale_to_unit_sup(make_density(family, params))
    l = log1p_square()
    L = moment_functional(z, l)
    bounds = []
    for y_tilde in (5.0, 10.0, 50.0):
        bound = tail_entropy_bound(TailBoundInputs(L=L, l=l, y_tilde=y_tilde))
        tail = tail_entropy(z, y_tilde)
        assert tail <= bound + 1e-9
        bounds.append(bound)
    assert bounds[0] > bounds[1] > bounds[2]


def test_tail_bound_with_zero_moment_is_constant_term():
    bound = tail_entropy_bound(TailBoundInputs(L=0.0, l=log1p_square(), y_tilde=10.0))
    assert bound == pytest.approx(math.log(4.0) / (math.e * math.log1p(100.0)))


def test_tail_bound_refuses_growing_ratio():
    # ln(1+y) / ln(1+y)^0.5 keeps growing
    with pytest.raises(MonotonicityError):
        tail_entropy_bound(TailBoundInputs(L=1.0, l=log_power(0.5), y_tilde=2.0))


def test_tail_bound_refuses_ratio_that_rises_before_falling():
    # ln(1+y) / sqrt(y) peaks near y = 3.9 and decreases all the way to the cap
    with pytest.raises(MonotonicityError, match="increases at y="):
        tail_entropy_bound(TailBoundInputs(L=1.0, l=sqrt(), y_tilde=0.1))
    beyond_peak = tail_entropy_bound(TailBoundInputs(L=1.0, l=sqrt(), y_tilde=10.0))
    expected = (
        math.log(math.pi) / math.sqrt(10.0)
        + 2.0 * math.log(11.0) / math.sqrt(10.0)
        + math.log(4.0) / (math.e * math.log(101.0))
    )
    assert beyond_peak == pytest.approx(expected, rel=1e-12)


def test_tail_bound_inputs_validation():
    with pytest.raises(ValidationError):
        TailBoundInputs(L=-1.0, l=log1p_square(), y_tilde=1.0)
    with pytest.raises(ValidationError):
        TailBoundInputs(L=1.0, l=log1p_square(), y_tilde=0.0)


def test_tail_entropy_needs_unit_sup():
    with pytest.raises(ValidationError):
        tail_entropy(make_density("gaussian", [0.0, 0.1]), 1.0)


def test_integrand_bound_on_unit_sup_density():
    z, _ = rescale_to_unit_sup(make_density("cauchy", [0.0, 0.1]))
    assert entropy_integrand_bound_holds(z, np.linspace(-10, 10, 2001))
    assert not entropy_integrand_bound_holds(make_density("gaussian", [0.0, 0.1]), [0.0])


def test_discrete_entropy():
    assert discrete_entropy([0.5, 0.5]) == pytest.approx(math.log(2.0))
    assert discrete_entropy([0.25] * 4, base=2.0) == pytest.approx(2.0)
    assert discrete_entropy([(1.0, 0.5), (2.0, 0.5)]) == pytest.approx(math.log(2.0))
    assert discrete_entropy([1.0, 0.0]) == 0.0
    assert discrete_entropy([0.2, 0.2]) == pytest.approx(-0.4 * math.log(0.2))
    with pytest.raises(ValidationError):
        discrete_entropy([0.2, 0.2], complete=True)
    with pytest.raises(ValidationError):
        discrete_entropy([1.2, -0.2])


def test_kl_divergence_between_unit_gaussians():
    p = make_density("gaussian", [0.0, 1.0])
    q = make_density("gaussian", [1.0, 1.0])
    assert kl_divergence(p, q) == pytest.approx(0.5, abs=1e-9)
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)


def test_to_bits():
    assert to_bits(math.log(8.0)) == pytest.approx(3.0)
