"""
Analyses built on the numerics: the entropy-convergence checker and the
closed-form worked examples.
"""

from .convergence import (
    ConvergenceConfig,
    ConvergenceReport,
    ConvergenceVerdict,
    DensitySequence,
    check_theorem1,
    constant_family,
    gaussian_scale_family,
    mixture_interpolation_family,
    pointwise_gap,
)
from .paperlab import (
    example1_c2_lower_bound,
    example1_density,
    example1_entropy_closed_form,
    example1_sequence,
    example2_channel_mi,
    example2_entropy_partial,
    example2_growth_diagnostic,
    example2_pmf,
)

__all__ = [
    "ConvergenceConfig",
    "ConvergenceReport",
    "ConvergenceVerdict",
    "DensitySequence",
    "check_theorem1",
    "constant_family",
    "example1_c2_lower_bound",
    "example1_density",
    "example1_entropy_closed_form",
    "example1_sequence",
    "example2_channel_mi",
    "example2_entropy_partial",
    "example2_growth_diagnostic",
    "example2_pmf",
    "gaussian_scale_family",
    "mixture_interpolation_family",
    "pointwise_gap",
]
