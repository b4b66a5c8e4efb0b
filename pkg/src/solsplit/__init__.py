"""Soliton scattering on a repulsive delta impurity.

Split-step simulation of the cubic Schrodinger flow with a point
impurity, the exact linear propagator, inverse-scattering predictions for
the outgoing solitons, and a reproduction harness for the transmission
experiments.
"""

from .dynamics import (
    ConservedReport,
    EvolutionConfig,
    SolitonParams,
    conserved_energy,
    conserved_hierarchy,
    conserved_mass,
    evolve,
    make_soliton,
    nls_step,
)
from .errors import ConfigError, LocalizationError, StabilityError
from .grids import (
    Grid,
    WaveField,
    free_fourier_multiply,
    half_line_mass,
    l2_norm_sq,
    make_grid,
    origin_index,
    read_field_csv,
    reflect,
    spectral_derivative,
    write_field_csv,
)
from .linear import (
    ScatteringCoefficients,
    cn_propagate,
    delta_propagate,
    exp_convolution,
    free_propagate,
    hv_split_residual,
    jost_eigenfunction,
    left_windowed_packet,
    scattering_coefficients,
    strichartz_probe,
)
from .theory import (
    OutgoingPrediction,
    PhaseScalingReport,
    ZSData,
    ZSDiscreteData,
    asymptotic_soliton,
    complex_log_gamma,
    outgoing_prediction,
    phase_scaling_report,
    phi0,
    transmission_theory,
    zs_discrete_data,
    zs_scattering_data,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Grid",
    "WaveField",
    "make_grid",
    "l2_norm_sq",
    "half_line_mass",
    "spectral_derivative",
    "free_fourier_multiply",
    "origin_index",
    "reflect",
    "write_field_csv",
    "read_field_csv",
    "ScatteringCoefficients",
    "scattering_coefficients",
    "jost_eigenfunction",
    "free_propagate",
    "exp_convolution",
    "delta_propagate",
    "cn_propagate",
    "hv_split_residual",
    "left_windowed_packet",
    "strichartz_probe",
    "SolitonParams",
    "EvolutionConfig",
    "ConservedReport",
    "make_soliton",
    "nls_step",
    "evolve",
    "conserved_mass",
    "conserved_energy",
    "conserved_hierarchy",
    "OutgoingPrediction",
    "ZSData",
    "ZSDiscreteData",
    "PhaseScalingReport",
    "transmission_theory",
    "phi0",
    "outgoing_prediction",
    "zs_scattering_data",
    "zs_discrete_data",
    "asymptotic_soliton",
    "complex_log_gamma",
    "phase_scaling_report",
    "ConfigError",
    "StabilityError",
    "LocalizationError",
]
