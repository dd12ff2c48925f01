"""Exception types shared across the package."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """Invalid parameters, dimensions or experiment configuration.

    ``key_path`` names the offending configuration key (for example
    ``algorithms[2].reweight_factor``) when the error comes from a config
    document.
    """

    def __init__(self, message: str, key_path: str | None = None):
        self.key_path = key_path
        self.reason = message
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class NumericalDivergenceError(ArithmeticError):
    """A filter update produced a non-finite weight."""

    def __init__(self, algorithm: str, iteration: int, trial_index: int | None = None):
        self.algorithm = algorithm
        self.iteration = iteration
        self.trial_index = trial_index
        where = f"iteration {iteration}"
        if trial_index is not None:
            where = f"trial {trial_index}, {where}"
        super().__init__(f"{algorithm} diverged at {where}")


class DivergenceError(RuntimeError):
    """One or more Monte Carlo trials diverged.

    Attributes
    ----------
    reports : dict
        Maps algorithm label to ``{trial_index: iteration}`` for every
        diverged trial.
    partial : dict
        Averaged curves of the algorithms that completed, keyed by label.
    """

    def __init__(self, reports: dict[str, dict[int, int]], partial: dict | None = None):
        self.reports = reports
        self.partial = partial or {}
        parts = []
        for label, trials in reports.items():
            idx = sorted(trials)
            shown = ", ".join(str(i) for i in idx[:10])
            more = f" (+{len(idx) - 10} more)" if len(idx) > 10 else ""
            parts.append(f"{label}: {len(idx)} diverged trial(s) [{shown}{more}]")
        super().__init__("; ".join(parts))
