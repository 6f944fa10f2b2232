from .conditions import (
    ConditionStatus,
    DiagnosticsConfig,
    TripletReport,
    check_conditions,
    cmin_construct,
    random_feasible_inputs,
    verify_output_moment_bound,
    z_of_y,
)
from .model import (
    ChannelSpec,
    DiscreteInput,
    DistortionFunction,
    input_cost,
    mutual_information,
    mutual_information_direct,
    output_density,
    transition_density,
)
from .spec import ChannelSpecModel, load_channel_spec, parse_channel_spec

__all__ = [
    "ChannelSpec",
    "ChannelSpecModel",
    "ConditionStatus",
    "DiagnosticsConfig",
    "DiscreteInput",
    "DistortionFunction",
    "TripletReport",
    "check_conditions",
    "cmin_construct",
    "input_cost",
    "load_channel_spec",
    "mutual_information",
    "mutual_information_direct",
    "output_density",
    "parse_channel_spec",
    "random_feasible_inputs",
    "transition_density",
    "verify_output_moment_bound",
    "z_of_y",
]
