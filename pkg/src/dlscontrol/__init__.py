"""Damped least-squares acceleration control of coupled Duffing oscillators."""

from .analysis import (
    BeatMetrics,
    SpectrumReport,
    TraceComparison,
    beat_metrics,
    characteristic_roots,
    compare_control_traces,
    control_eigenvalue_offset,
    count_exchange_cycles,
    step_map_spectrum,
)
from .dls import DlsWeights, acceleration_error, dls_solve, dls_solve_isotropic
from .duffing import (
    DuffingControlConfig,
    DuffingParams,
    DuffingPlant,
    control_update,
    conserved_energy,
)
from .dynamics import DivergenceError, PlantModel, SystemState, euler_step
from .experiments import PRESET_NAMES, preset_config, run_preset, run_sweep
from .io import read_trajectory_csv, write_trajectory_csv
from .simulate import SimulationConfig, Trajectory, simulate

__all__ = [
    "BeatMetrics",
    "DivergenceError",
    "DlsWeights",
    "DuffingControlConfig",
    "DuffingParams",
    "DuffingPlant",
    "PlantModel",
    "PRESET_NAMES",
    "SimulationConfig",
    "SpectrumReport",
    "SystemState",
    "TraceComparison",
    "Trajectory",
    "acceleration_error",
    "beat_metrics",
    "characteristic_roots",
    "compare_control_traces",
    "conserved_energy",
    "control_eigenvalue_offset",
    "control_update",
    "count_exchange_cycles",
    "dls_solve",
    "dls_solve_isotropic",
    "euler_step",
    "preset_config",
    "read_trajectory_csv",
    "run_preset",
    "run_sweep",
    "simulate",
    "step_map_spectrum",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
