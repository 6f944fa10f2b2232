from .densities import Density, density_from_config, location_mixture, make_density, mixture
from .entropy import (
    TailBoundInputs,
    differential_entropy,
    discrete_entropy,
    kl_divergence,
    rescale_to_unit_sup,
    tail_entropy,
    tail_entropy_bound,
)
from .moments import (
    MomentFunction,
    markov_tightness_bound,
    moment_function_from_config,
    moment_functional,
    superlog_diagnostic,
)
from .quadrature import IntegralResult, QuadratureConfig, TailTransform, integrate

__all__ = [
    "Density",
    "IntegralResult",
    "MomentFunction",
    "QuadratureConfig",
    "TailBoundInputs",
    "TailTransform",
    "density_from_config",
    "differential_entropy",
    "discrete_entropy",
    "integrate",
    "kl_divergence",
    "location_mixture",
    "make_density",
    "markov_tightness_bound",
    "mixture",
    "moment_function_from_config",
    "moment_functional",
    "rescale_to_unit_sup",
    "superlog_diagnostic",
    "tail_entropy",
    "tail_entropy_bound",
]
