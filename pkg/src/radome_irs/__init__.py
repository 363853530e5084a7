"""Simulator and optimizer for reflecting surfaces built into a BS radome.

The package models the element-wise near-field channel between single-antenna
users and a uniform planar array surrounded by four passive reflecting
surfaces, evaluates the multi-user uplink sum rate, and optimizes the
unit-modulus reflection coefficients with perfect CSI (successive refinement)
or without CSI (random phase adjustment, its iterative variant, and an
exhaustive DFT codebook search).
"""

from .channel import (
    ChannelTensors,
    Grouping,
    PathSet,
    apply_grouping,
    assemble_effective_channel,
    build_far_field_tensors,
    build_tensors,
    column_grouping,
    direct_channel,
    double_reflection_component,
    random_reflection_state,
    sample_paths,
    single_reflection_component,
)
from .config import ConfigError, SimConfig, dbm_to_watt, load_config, parse_config_text
from .geometry import RadomeLayout, Surface, build_layout, module_partition
from .optimize import (
    IrpaParams,
    OptimizerTrace,
    SrParams,
    dft_codebook,
    dft_codebook_search,
    irpa,
    rpa,
    solve_element_subproblem,
    successive_refinement,
)
from .propagation import (
    Direction,
    IrsAngles,
    antenna_gain,
    aoa_transform,
    element_reflection_gain,
    irs_array_response,
    los_gain,
    steering_vector,
)
from .rate import ChannelOracle, RateParams, make_oracle, sum_rate

__all__ = [
    "ChannelOracle",
    "ChannelTensors",
    "ConfigError",
    "Direction",
    "Grouping",
    "IrpaParams",
    "IrsAngles",
    "OptimizerTrace",
    "PathSet",
    "RadomeLayout",
    "RateParams",
    "SimConfig",
    "SrParams",
    "Surface",
    "antenna_gain",
    "aoa_transform",
    "apply_grouping",
    "assemble_effective_channel",
    "build_far_field_tensors",
    "build_layout",
    "build_tensors",
    "column_grouping",
    "dbm_to_watt",
    "dft_codebook",
    "dft_codebook_search",
    "direct_channel",
    "double_reflection_component",
    "element_reflection_gain",
    "irpa",
    "irs_array_response",
    "load_config",
    "los_gain",
    "make_oracle",
    "module_partition",
    "parse_config_text",
    "random_reflection_state",
    "rpa",
    "sample_paths",
    "single_reflection_component",
    "solve_element_subproblem",
    "steering_vector",
    "successive_refinement",
    "sum_rate",
]

__version__ = "0.1.0"
