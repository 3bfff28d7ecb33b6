"""Which-path complementarity: ideal interferometer engine, device-level
pulse simulation, tomography and the sweep harness."""

from .device import PRESETS, DeviceParams, load_config
from .errors import (
    ArgumentError,
    ComplementarityError,
    ConfigurationError,
    ConsistencyError,
    DegenerateComplementError,
    DegeneratePathError,
    DegenerateProjectionError,
    EmbeddingError,
    FitError,
)
from .fringe import FringeRecord, fit_fringe
from .harness import Scenario, SweepRow, emit_results, parse_results, run_scenario
from .measures import ComplementarityTriplet, concurrence, distinguishability, l1_coherence, wpd_overlap
from .quantum_core import DensityOperator, StateVector, partial_trace, tensor

__all__ = [
    "PRESETS",
    "DeviceParams",
    "load_config",
    "ArgumentError",
    "ComplementarityError",
    "ConfigurationError",
    "ConsistencyError",
    "DegenerateComplementError",
    "DegeneratePathError",
    "DegenerateProjectionError",
    "EmbeddingError",
    "FitError",
    "FringeRecord",
    "fit_fringe",
    "Scenario",
    "SweepRow",
    "emit_results",
    "parse_results",
    "run_scenario",
    "ComplementarityTriplet",
    "concurrence",
    "distinguishability",
    "l1_coherence",
    "wpd_overlap",
    "DensityOperator",
    "StateVector",
    "partial_trace",
    "tensor",
]
