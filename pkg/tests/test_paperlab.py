import math

import numpy as np
import pytest

from capfin.analysis.paperlab import (
    EXAMPLE1_M_LIST,
    example1_c2_lower_bound,
    example1_density,
    example1_entropy_closed_form,
    example1_limit,
    example1_rows,
    example2_channel_mi,
    example2_discrete_entropy,
    example2_entropy_partial,
    example2_growth_diagnostic,
    example2_pmf,
    example2_rows,
)
from capfin.errors import ValidationError
from capfin.numerics.entropy import differential_entropy
from capfin.numerics.moments import log_power, moment_functional, power


def test_example1_density_values():
    assert float(example1_density(m=3).pdf(0.5)) == pytest.approx(0.089760, abs=1e-6)
    assert float(example1_density(m=100).pdf(2.0)) == pytest.approx(0.023577, abs=1e-6)
    p = example1_density(m=100)
    assert float(p.pdf(-0.1)) == 0.0
    assert float(p.pdf(101.0)) == 0.0
    assert p.sup_bound == 1.0


def test_example1_cdf_and_quantile():
    p = example1_density(m=100)
    assert float(p.cdf(1.0)) == pytest.approx(1.0 - 1.0 / math.log(100.0))
    assert float(p.cdf(100.0)) == pytest.approx(1.0)
    assert p.quantile(0.9) == pytest.approx(float(np.exp((0.9 - (1 - 1 / math.log(100))) * math.log(100) ** 2)))


@pytest.mark.parametrize("m", [3, 10, 100, 10**4])
def test_example1_quadrature_matches_closed_form(m):
    h = differential_entropy(example1_density(m=m))
    assert h == pytest.approx(example1_entropy_closed_form(m=m), abs=1e-8)


def test_example1_entropy_tends_to_one_half():
    assert example1_entropy_closed_form(log_m=1e9) == pytest.approx(0.5, abs=0.01)
    assert differential_entropy(example1_limit()) == pytest.approx(0.0, abs=1e-12)
    values = [example1_entropy_closed_form(m=m) for m in EXAMPLE1_M_LIST]
    assert values == sorted(values, reverse=True)
    assert all(v > 0.4 for v in values[1:])


def test_example1_rows():
    rows = example1_rows([10.0, 100.0])
    assert [r[0] for r in rows] == [10.0, 100.0]
    assert all(r[3] < 1e-8 for r in rows)


def test_example1_parameter_validation():
    with pytest.raises(ValidationError):
        example1_density(m=2)
    with pytest.raises(ValidationError):
        example1_density()
    with pytest.raises(ValidationError):
        example1_density(m=10, log_m=math.log(10))


def test_c2_lower_bound_closed_form():
    assert example1_c2_lower_bound(power(1), kappa=2.0, c=math.e, m=math.exp(4.0)) == pytest.approx(0.9375)


@pytest.mark.parametrize("m", [10**2, 10**4])
def test_log_square_moment_exceeds_lower_bound(m):
    l = log_power(2)
    bound = example1_c2_lower_bound(l, kappa=1.0, c=math.e, m=m)
    moment = moment_functional(example1_density(m=m), l)
    assert moment > bound > 3.0 / 8.0


def test_c2_lower_bound_validation():
    with pytest.raises(ValidationError):
        example1_c2_lower_bound(log_power(1), kappa=2.0, c=math.e, m=1e4)
    with pytest.raises(ValidationError):
        example1_c2_lower_bound(power(1), kappa=1.0, c=10.0, m=50.0)
    with pytest.raises(ValidationError):
        example1_c2_lower_bound(power(1), kappa=1.0, c=1.0, m=50.0)


def test_example2_pmf():
    pmf = example2_pmf(1, 10)
    assert pmf.support.tolist() == list(range(2, 11))
    assert pmf.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    assert pmf.masses[0] == pytest.approx(1.0 / (2.0 * math.log(2.0) ** 2))
    assert pmf.tail_bound == pytest.approx(1.0 / math.log(10.0))
    k = np.arange(11, 10**6, dtype=float)
    assert float(np.sum(1.0 / (k * np.log(k) ** 2))) <= pmf.tail_bound
    assert "K=10" in pmf.tail_note


def test_example2_entropy_matches_direct_sum():
    for i in (1, 2):
        assert example2_entropy_partial(i, 1000) == pytest.approx(example2_discrete_entropy(i, 1000), abs=1e-10)


def test_example2_first_law_diverges():
    diag = example2_growth_diagnostic(1)
    assert diag.diverging
    assert all(d > 0 for d in diag.increments)


def test_example2_second_law_converges():
    diag = example2_growth_diagnostic(2)
    assert not diag.diverging
    assert diag.increments_shrinking
    assert all(d > 0 for d in diag.increments)
    assert diag.increments[-1] < 0.015
    assert diag.to_dict()["K"] == [10**3, 10**4, 10**5, 10**6]


def test_example2_channel_reveals_the_input():
    assert example2_channel_mi(1, 50) == pytest.approx(example2_discrete_entropy(1, 50), abs=1e-6)


def test_example2_rows_and_validation():
    rows = example2_rows(2, [100, 10])
    assert [r[0] for r in rows] == [10, 100]
    assert rows[0][5] is None
    assert rows[1][5] == pytest.approx(rows[1][2] - rows[0][2])
    with pytest.raises(ValidationError):
        example2_pmf(3, 100)
    with pytest.raises(ValidationError):
        example2_pmf(1, 1)
    with pytest.raises(ValidationError):
        example2_growth_diagnostic(1, [1000])
