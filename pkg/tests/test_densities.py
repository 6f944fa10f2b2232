import math

import numpy as np
import pytest

from capfin.errors import ValidationError
from capfin.numerics.densities import (
    density_from_config,
    location_mixture,
    make_density,
    mixture,
)
from capfin.numerics.entropy import differential_entropy
from capfin.numerics.quadrature import integrate_density_functional

CATALOG = [
    ("gaussian", [0.0, 1.0]),
    ("gaussian", [2.0, 0.3]),
    ("cauchy", [0.0, 1.0]),
    ("uniform", [-1.0, 3.0]),
    ("pareto", [3.0, 1.0]),
    ("gamma", [2.0, 1.5]),
    ("gennorm", [0.0, 1.0, 1.5]),
    ("student_t", [3.0, 0.0, 1.0]),
]


@pytest.mark.parametrize("family,params", CATALOG)
def test_catalog_densities_are_normalized(family, params):
    p = make_density(family, params)
    result = integrate_density_functional(p, lambda y: float(p.pdf(y)))
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("family,params", CATALOG)
def test_log_pdf_matches_pdf(family, params):
    p = make_density(family, params)
    lo, hi = p.support
    ys = np.linspace(max(lo, -5.0) + 1e-3, min(hi, 5.0 + max(lo, 0.0)) - 1e-3, 17)
    with np.errstate(divide="ignore"):
        assert np.allclose(np.exp(p.log_pdf(ys)), p.pdf(ys), rtol=1e-12, atol=0.0)


@pytest.mark.parametrize("family,params", CATALOG)
def test_sup_bound_dominates_samples(family, params):
    p = make_density(family, params)
    lo, hi = p.support
    ys = np.linspace(max(lo, -20.0), min(hi, 20.0), 4001)
    assert np.max(p.pdf(ys)) <= p.sup_bound * (1 + 1e-12)


def test_quantile_closed_form_and_cdf_inversion():
    g = make_density("gaussian", [0.0, 1.0])
    assert g.quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-12)
    mix = mixture([(0.5, g), (0.5, make_density("gaussian", [0.0, 1.0]))])
    assert mix.ppf is None
    assert mix.quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-9)
    with pytest.raises(ValidationError):
        g.quantile(1.0)


def test_single_component_mixture_is_the_component():
    g = make_density("gaussian", [0.0, 1.0])
    assert mixture([(1.0, g)]) is g


@pytest.mark.parametrize("weights", [[0.5, 0.6], [1.2, -0.2], [0.0, 1.0]])
def test_mixture_rejects_bad_weights(weights):
    g = make_density("gaussian", [0.0, 1.0])
    with pytest.raises(ValidationError):
        mixture([(w, g) for w in weights])


def test_location_mixture_matches_explicit_mixture():
    g = make_density("gaussian", [0.0, 1.0])
    offsets, weights = [-2.0, 0.5, 3.0], [0.2, 0.5, 0.3]
    fast = location_mixture(g, offsets, weights)
    slow = mixture([(w, g.shifted(o)) for o, w in zip(offsets, weights)])
    ys = np.linspace(-8, 8, 101)
    assert np.allclose(fast.pdf(ys), slow.pdf(ys), rtol=1e-12)
    assert np.allclose(fast.log_pdf(ys), slow.log_pdf(ys), rtol=1e-12)
    assert fast.support == (-math.inf, math.inf)


def test_location_mixture_drops_zero_weights():
    u = make_density("uniform", [0.0, 1.0])
    single = location_mixture(u, [0.0, 5.0], [0.0, 1.0])
    assert single.support == (5.0, 6.0)


def test_shift_and_scale_move_entropy():
    g = make_density("gaussian", [0.0, 1.0])
    h = differential_entropy(g)
    assert differential_entropy(g.shifted(3.0)) == pytest.approx(h, abs=1e-9)
    assert differential_entropy(g.scaled(4.0)) == pytest.approx(h + math.log(4.0), abs=1e-9)
    assert g.scaled(4.0).analytic_entropy == pytest.approx(h + math.log(4.0), abs=1e-12)
    with pytest.raises(ValidationError):
        g.scaled(0.0)


def test_unknown_family_and_bad_params():
    with pytest.raises(ValidationError, match="unknown density family"):
        make_density("laplace-ish", [0.0, 1.0])
    with pytest.raises(ValidationError):
        make_density("gaussian", [0.0])
    with pytest.raises(ValidationError):
        make_density("gaussian", [0.0, -1.0])
    with pytest.raises(ValidationError):
        make_density("uniform", [1.0, 1.0])
    with pytest.raises(ValidationError):
        make_density("gamma", [0.5, 1.0])


def test_density_from_config_builds_mixtures():
    cfg = {
        "family": "mixture",
        "components": [
            {"weight": 0.25, "density": {"family": "uniform", "params": [0.0, 1.0]}},
            {"weight": 0.75, "density": {"family": "uniform", "params": [1.0, 2.0]}},
        ],
    }
    p = density_from_config(cfg)
    assert float(p.pdf(0.5)) == pytest.approx(0.25)
    assert float(p.pdf(1.5)) == pytest.approx(0.75)
    assert p.discontinuities == (0.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        density_from_config({"params": [0.0, 1.0]})
