from pathlib import Path

import pytest

from capfin.channel.model import ChannelSpec, identity, signed_exp
from capfin.numerics.densities import make_density
from capfin.numerics.moments import log_power, power, zero
from capfin.numerics.quadrature import QuadratureConfig

CONF_DIR = Path(__file__).resolve().parent.parent / "conf"


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def gaussian():
    return make_density("gaussian", [0.0, 1.0])


@pytest.fixture
def cauchy():
    return make_density("cauchy", [0.0, 1.0])


@pytest.fixture
def unit_uniform():
    return make_density("uniform", [0.0, 1.0])


@pytest.fixture
def awgn():
    return ChannelSpec(
        f=identity(),
        noise=make_density("gaussian", [0.0, 1.0]),
        cost=power(2),
        noise_moment=log_power(2),
        budget=1.0,
    )


@pytest.fixture
def exp_channel():
    return ChannelSpec(
        f=signed_exp(),
        noise=make_density("gaussian", [0.0, 1.0]),
        cost=log_power(2),
        noise_moment=log_power(2),
        budget=1.0,
    )


@pytest.fixture
def uniform_channel():
    return ChannelSpec(
        f=identity(),
        noise=make_density("uniform", [0.0, 1.0]),
        cost=zero(),
        noise_moment=zero(),
        budget=1.0,
    )
