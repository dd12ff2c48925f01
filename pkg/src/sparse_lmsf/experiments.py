"""Monte Carlo harness: averaged learning curves, comparisons and sweeps.

Trials are independent.  Trial ``i`` draws its channel, excitation and noise
from three substreams of ``SeedSequence(master_seed, spawn_key=(i,))``, so a
trial's realization depends only on ``(master_seed, i)``: every algorithm and
every sweep grid point sees the same channels, inputs and noise (paired
trials), and results do not depend on how trials are batched or threaded.

Internally a batch of trials is advanced together, one row per trial, using
the same update arithmetic as :func:`sparse_lmsf.algorithms.step`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algorithms import AlgorithmParams, apply_update
from .errors import ConfigurationError, DivergenceError, NumericalDivergenceError
from .signal_model import generate_sparse_channel, snr_to_noise_variance

__all__ = [
    "SWEEPABLE",
    "SweepSpec",
    "ExperimentConfig",
    "LearningCurve",
    "SweepResult",
    "trial_streams",
    "run_trials",
    "run_trial",
    "monte_carlo_average",
    "steady_state_msd",
    "default_steady_window",
    "best_index",
    "sweep_parameter",
    "compare_algorithms",
]

SWEEPABLE = ("reg_param", "reweight_factor", "step_size", "threshold")
_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class SweepSpec:
    algorithm_label: str
    parameter: str
    grid: tuple[float, ...]

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigurationError(
                f"cannot sweep {self.parameter!r}; choose one of {', '.join(SWEEPABLE)}", "sweep.parameter")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigurationError("sweep grid is empty", "sweep.grid")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a Monte Carlo run.

    ``snr_db`` may be ``inf`` for noise-free runs. ``steady_window`` is the
    number of trailing iterations averaged into a steady-state MSD; ``None``
    means the final 10% of the curve.
    """

    n_taps: int
    sparsity: int
    snr_db: float
    n_iterations: int
    n_trials: int
    master_seed: int
    algorithms: tuple[AlgorithmParams, ...] = ()
    sweep: SweepSpec | None = None
    steady_window: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.n_taps < 1:
            raise ConfigurationError(f"n_taps must be >= 1, got {self.n_taps}", "n_taps")
        if not 1 <= self.sparsity <= self.n_taps:
            raise ConfigurationError(
                f"sparsity out of range: K={self.sparsity} must satisfy 1 <= K <= N={self.n_taps}", "sparsity")
        if self.n_iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.n_iterations}", "iterations")
        if self.n_trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.n_trials}", "trials")
        if not 0 <= self.master_seed <= _MAX_SEED:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.master_seed}", "seed")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigurationError(f"invalid snr_db {self.snr_db!r}", "snr_db")
        if self.steady_window is not None and not 1 <= self.steady_window <= self.n_iterations:
            raise ConfigurationError(
                f"steady_window must lie in [1, {self.n_iterations}], got {self.steady_window}", "steady_window")

        labels = [a.label for a in self.algorithms]
        for i, label in enumerate(labels):
            if label in labels[:i]:
                raise ConfigurationError(f"duplicate algorithm label {label!r}", f"algorithms[{i}].label")

        if self.sweep is not None:
            if self.sweep.algorithm_label not in labels:
                raise ConfigurationError(
                    f"no algorithm labelled {self.sweep.algorithm_label!r}", "sweep.algorithm_label")
            target = self.algorithm(self.sweep.algorithm_label)
            for j, v in enumerate(self.sweep.grid):
                try:
                    target.with_value(self.sweep.parameter, v)
                except ConfigurationError as exc:
                    raise ConfigurationError(exc.reason, f"sweep.grid[{j}]") from None

    @property
    def noise_variance(self) -> float:
        return snr_to_noise_variance(self.snr_db)

    @property
    def steady_window_or_default(self) -> int:
        if self.steady_window is not None:
            return self.steady_window
        return default_steady_window(self.n_iterations)

    def algorithm(self, label: str) -> AlgorithmParams:
        for a in self.algorithms:
            if a.label == label:
                return a
        raise ConfigurationError(f"no algorithm labelled {label!r}", "algorithms")

    def replace(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class LearningCurve:
    """Squared deviation per iteration (one trial) or its trial average."""

    values: np.ndarray
    n_trials: int = 1

    def __len__(self):
        return self.values.size

    def db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.values)


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    grid: tuple[float, ...]
    steady_state_msd: np.ndarray
    best_index: int
    curves: tuple[LearningCurve, ...] = field(default=(), repr=False)

    @property
    def best_value(self) -> float:
        return self.grid[self.best_index]


def trial_streams(master_seed: int, trial_index: int):
    """Independent ``(channel, excitation, noise)`` generators for one trial."""
    root = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return tuple(np.random.default_rng(s) for s in root.spawn(3))


def default_steady_window(n_iterations: int) -> int:
    return max(1, n_iterations // 10)


def _simulate(config: ExperimentConfig, algorithm: AlgorithmParams, trial_indices: Sequence[int]):
    """Run a batch of trials; returns ``(curves, {trial_index: iteration})``.

    Rows of ``curves`` belonging to diverged trials are NaN.
    """
    n, t_len = config.n_taps, config.n_iterations
    b = len(trial_indices)
    sigma = math.sqrt(config.noise_variance)

    truth = np.empty((b, n))
    # Excitation is zero-padded in front: the window starts empty and fills up.
    stream = np.zeros((b, t_len + n - 1))
    noise = np.empty((b, t_len))
    for row, trial in enumerate(trial_indices):
        channel_rng, excitation_rng, noise_rng = trial_streams(config.master_seed, trial)
        truth[row] = generate_sparse_channel(n, config.sparsity, channel_rng).taps
        stream[row, n - 1:] = excitation_rng.standard_normal(t_len)
        noise[row] = noise_rng.standard_normal(t_len) * sigma

    weights = np.zeros((b, n))
    curves = np.empty((b, t_len))
    alive = np.ones(b, dtype=bool)
    diverged: dict[int, int] = {}

    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(t_len):
            x = stream[:, it:it + n][:, ::-1]
            y = np.sum(truth * x, axis=-1) + noise[:, it]
            weights, _, _ = apply_update(algorithm, weights, x, y)
            dev = truth - weights
            curves[:, it] = np.sum(dev * dev, axis=-1)

            bad = alive & ~np.isfinite(curves[:, it])
            if bad.any():
                for row in np.flatnonzero(bad):
                    diverged[int(trial_indices[row])] = it
                alive &= ~bad
                weights[bad] = 0.0

    if diverged:
        curves[~alive] = np.nan
    return curves, diverged


def run_trials(config: ExperimentConfig, algorithm: AlgorithmParams, threads: int = 1) -> np.ndarray:
    """Learning curves of every trial, shape ``(n_trials, n_iterations)``.

    Raises
    ------
    DivergenceError
        If any trial produced a non-finite estimate; ``reports`` lists the
        diverged trial indices and the iteration at which each failed.
    """
    trials = np.arange(config.n_trials)
    threads = max(1, min(int(threads), config.n_trials))
    chunks = [c for c in np.array_split(trials, threads) if c.size]
    if threads == 1:
        results = [_simulate(config, algorithm, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _simulate(config, algorithm, c), chunks))

    curves = np.concatenate([r[0] for r in results], axis=0)
    diverged = {}
    for _, d in results:
        diverged.update(d)
    if diverged:
        raise DivergenceError({algorithm.label: dict(sorted(diverged.items()))})
    return curves


def run_trial(config: ExperimentConfig, algorithm: AlgorithmParams, trial_index: int) -> LearningCurve:
    """Squared deviation after each update of a single trial.

    The estimate starts at zero, so the deviation before the first update
    is exactly 1 for a unit-energy channel.
    """
    if not 0 <= trial_index < config.n_trials:
        raise ConfigurationError(f"trial_index {trial_index} outside [0, {config.n_trials})")
    curves, diverged = _simulate(config, algorithm, [trial_index])
    if diverged:
        raise NumericalDivergenceError(algorithm.label, diverged[trial_index], trial_index)
    return LearningCurve(curves[0])


def _average(curves: np.ndarray) -> LearningCurve:
    total = np.zeros(curves.shape[1])
    for row in curves:  # trial-index order
        total += row
    return LearningCurve(total / curves.shape[0], n_trials=curves.shape[0])


def monte_carlo_average(config: ExperimentConfig, algorithm: AlgorithmParams, threads: int = 1) -> LearningCurve:
    """Mean learning curve over ``config.n_trials`` paired trials (the MSD curve)."""
    return _average(run_trials(config, algorithm, threads))


def steady_state_msd(curve, window: int | None = None) -> float:
    """Mean of the last ``window`` entries (default: final 10% of the curve)."""
    values = np.asarray(getattr(curve, "values", curve), dtype=float)
    if window is None:
        window = default_steady_window(values.size)
    if not 1 <= window <= values.size:
        raise ConfigurationError(f"window must lie in [1, {values.size}], got {window}", "steady_window")
    return float(np.mean(values[-window:]))


def _resolve(config: ExperimentConfig, algorithm) -> AlgorithmParams:
    if isinstance(algorithm, AlgorithmParams):
        return algorithm
    return config.algorithm(algorithm)


def best_index(values, grid) -> int:
    """Index of the minimum of ``values``; ties go to the smaller grid value."""
    return min(range(len(values)), key=lambda i: (values[i], grid[i]))


def sweep_parameter(config: ExperimentConfig, algorithm, parameter_name: str,
                    grid: Sequence[float], threads: int = 1) -> SweepResult:
    """Steady-state MSD of ``algorithm`` at each value of one hyperparameter.

    All grid points reuse the same trial realizations. The best index is the
    argmin; ties go to the smaller parameter value.
    """
    base = _resolve(config, algorithm)
    spec = SweepSpec(base.label, parameter_name, tuple(grid))
    variants = [base.with_value(parameter_name, v) for v in spec.grid]

    window = config.steady_window_or_default
    curves = []
    failures: dict[str, dict[int, int]] = {}
    for v, params in zip(spec.grid, variants):
        try:
            curves.append(monte_carlo_average(config, params, threads))
        except DivergenceError as exc:
            failures[f"{base.label}[{parameter_name}={v!r}]"] = exc.reports[base.label]
    if failures:
        raise DivergenceError(failures)

    msd = np.array([steady_state_msd(c, window) for c in curves])
    return SweepResult(parameter_name, spec.grid, msd, best_index(msd, spec.grid), tuple(curves))


def compare_algorithms(config: ExperimentConfig, threads: int = 1) -> dict[str, LearningCurve]:
    """Averaged MSD curve of every configured algorithm over the same trials.

    A diverging algorithm does not stop the others; once all have run, a
    :class:`DivergenceError` carrying per-algorithm reports and the completed
    curves (``partial``) is raised.
    """
    if not config.algorithms:
        raise ConfigurationError("no algorithms configured", "algorithms")
    out: dict[str, LearningCurve] = {}
    reports: dict[str, dict[int, int]] = {}
    for params in config.algorithms:
        try:
            out[params.label] = monte_carlo_average(config, params, threads)
        except DivergenceError as exc:
            reports.update(exc.reports)
    if reports:
        raise DivergenceError(reports, partial=out)
    return out
