"""Experiment harness: config parsing, runners, soliton fitting, plotting."""

from .cli import main
from .config import ExperimentConfig, default_dt, parse_config
from .fitting import FittedSoliton, fit_soliton, wrap_phase
from .plotting import PlotSpec, emit_plot
from .runs import (
    ChannelReport,
    LinearProbeRecord,
    LinearProbeResult,
    ResolutionReport,
    ScalingResult,
    SnapshotResult,
    TransmissionRecord,
    run_linear_probe,
    run_resolution,
    run_scaling_study,
    run_snapshot,
    run_transmission_sweep,
    transmission_measurement_time,
)

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "default_dt",
    "FittedSoliton",
    "fit_soliton",
    "wrap_phase",
    "PlotSpec",
    "emit_plot",
    "TransmissionRecord",
    "ScalingResult",
    "SnapshotResult",
    "ChannelReport",
    "ResolutionReport",
    "LinearProbeRecord",
    "LinearProbeResult",
    "transmission_measurement_time",
    "run_snapshot",
    "run_transmission_sweep",
    "run_scaling_study",
    "run_resolution",
    "run_linear_probe",
    "main",
]
