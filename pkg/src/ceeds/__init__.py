"""CEEDS: cyclical-error denial for closed-loop motor control.

PIDF control augmented with matrix-profile motif discovery: the
controller logs its own error, mines it for the dominant periodic shape,
and feeds the negated shape forward to cancel the interference at its
source phase.
"""

from .cancellation import (
    CancellationCycle,
    build_cycle,
    retroactive_score,
    select_best,
    tile_cancellation,
)
from .control import (
    CeedsController,
    Phase,
    PidGains,
    PidState,
    TransferFunction,
    fit_transfer,
    pid_step,
)
from .errors import CeedsError
from .experiment import (
    ExperimentConfig,
    ExperimentLog,
    error_reduction,
    run_experiment,
    write_csv,
)
from .matrix_profile import (
    MatrixProfile,
    WindowStats,
    brute_force_profile,
    compute_window_stats,
    distance_profile,
    mpx,
    subsequence_distance,
)
from .motif import AnalysisConfig, FeatureSet, Motif, motif_features, top_motifs
from .plant import Plant, Waveform, parse_waveform, waveform_sample
from .timeseries import TimeSeries

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "CancellationCycle",
    "CeedsController",
    "CeedsError",
    "ExperimentConfig",
    "ExperimentLog",
    "FeatureSet",
    "MatrixProfile",
    "Motif",
    "Phase",
    "PidGains",
    "PidState",
    "Plant",
    "TimeSeries",
    "TransferFunction",
    "Waveform",
    "WindowStats",
    "brute_force_profile",
    "build_cycle",
    "compute_window_stats",
    "distance_profile",
    "error_reduction",
    "fit_transfer",
    "motif_features",
    "mpx",
    "parse_waveform",
    "pid_step",
    "retroactive_score",
    "run_experiment",
    "select_best",
    "subsequence_distance",
    "tile_cancellation",
    "top_motifs",
    "waveform_sample",
    "write_csv",
]
