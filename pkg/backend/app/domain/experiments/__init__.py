"""
Experiments (pipeline, rewinding, sweeps)
"""
from .schemas import (
    AnalysisSchedule,
    ExperimentBundle,
    ExperimentConfig,
    RewindCell,
    RewindResult,
    SweepResult,
    SweepRow,
)
from .pipeline import analysis_epochs, layer_reports, prepare_data, run_memorization_experiment
from .rewind import rewind_layer, rewind_sweep
from .sweeps import DEFAULT_WIDTH_FACTORS, epsilon_sweep, monotone_inversions, width_sweep
from app.infrastructure.storage.activation_dump import ActivationDump, ingest_activation_dump

__all__ = [
    "AnalysisSchedule",
    "ExperimentBundle",
    "ExperimentConfig",
    "RewindCell",
    "RewindResult",
    "SweepResult",
    "SweepRow",
    "analysis_epochs",
    "layer_reports",
    "prepare_data",
    "run_memorization_experiment",
    "rewind_layer",
    "rewind_sweep",
    "DEFAULT_WIDTH_FACTORS",
    "epsilon_sweep",
    "monotone_inversions",
    "width_sweep",
    "ActivationDump",
    "ingest_activation_dump",
]
