"""LMS/F adaptive filters with zero-attracting sparsity penalties.

Submodules: :mod:`~sparse_lmsf.algorithms` (filter updates and costs),
:mod:`~sparse_lmsf.signal_model` (channels, excitation, noise, MSD),
:mod:`~sparse_lmsf.experiments` (Monte Carlo harness) and
:mod:`~sparse_lmsf.cli`.
"""

__version__ = "0.1.0"

from .algorithms import AlgorithmParams, FilterState, Kind, StepRecord, step
from .errors import ConfigurationError, DivergenceError, NumericalDivergenceError
from .experiments import (
    ExperimentConfig,
    LearningCurve,
    SweepResult,
    compare_algorithms,
    monte_carlo_average,
    run_trial,
    steady_state_msd,
    sweep_parameter,
)
from .signal_model import SparseChannel, generate_sparse_channel, squared_deviation

__all__ = [
    "AlgorithmParams",
    "ConfigurationError",
    "DivergenceError",
    "ExperimentConfig",
    "FilterState",
    "Kind",
    "LearningCurve",
    "NumericalDivergenceError",
    "SparseChannel",
    "StepRecord",
    "SweepResult",
    "compare_algorithms",
    "generate_sparse_channel",
    "monte_carlo_average",
    "run_trial",
    "squared_deviation",
    "steady_state_msd",
    "step",
    "sweep_parameter",
]
