"""Adaptive-filter updates: LMS, LMF, LMS/F and their zero-attracting variants.

Every update has the form ``h(n+1) = h(n) + increment`` with the a-priori
error ``e(n) = y(n) - h(n)^T x(n)``.  The error-driven part of the increment is

    LMS     mu * e * x
    LMF     mu * e**3 * x
    LMS/F   mu * e**3 * x / (e**2 + lam)

and the sparse kinds subtract a zero attractor from it,

    ZA      gamma * sgn(h),                 gamma = mu * rho
    RZA     gamma * sgn(h) / (1 + eps*|h|), gamma = mu * rho / eps

The array functions (:func:`increment`, :func:`apply_update`) broadcast over
leading axes so the Monte Carlo harness can advance a whole batch of trials
with the same arithmetic as the single-state ``*_step`` functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericalDivergenceError

__all__ = [
    "Kind",
    "AlgorithmParams",
    "FilterState",
    "StepRecord",
    "predict",
    "compute_error",
    "sign_vector",
    "variable_step_gain",
    "increment",
    "apply_update",
    "lms_step",
    "lmf_step",
    "lmsf_step",
    "za_lms_step",
    "rza_lms_step",
    "za_lmsf_step",
    "rza_lmsf_step",
    "step",
    "cost_lmsf",
    "cost_za",
    "cost_rza",
]


class Kind(str, enum.Enum):
    LMS = "LMS"
    LMF = "LMF"
    LMSF = "LMSF"
    ZA_LMS = "ZA_LMS"
    RZA_LMS = "RZA_LMS"
    ZA_LMSF = "ZA_LMSF"
    RZA_LMSF = "RZA_LMSF"

    @property
    def uses_threshold(self) -> bool:
        return self in (Kind.LMSF, Kind.ZA_LMSF, Kind.RZA_LMSF)

    @property
    def is_reweighted(self) -> bool:
        return self in (Kind.RZA_LMS, Kind.RZA_LMSF)

    @property
    def is_sparse(self) -> bool:
        return self in (Kind.ZA_LMS, Kind.RZA_LMS, Kind.ZA_LMSF, Kind.RZA_LMSF)


def _positive(value, name):
    if value is None:
        raise ConfigurationError(f"missing required parameter {name!r}", name)
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be a finite positive number, got {value!r}", name)
    return value


@dataclass(frozen=True)
class AlgorithmParams:
    """Hyperparameters of one adaptive filter.

    Parameters
    ----------
    kind : Kind or str
        Algorithm family.
    step_size : float
        ``mu_s`` for LMS-type kinds, ``mu_f`` for LMS/F-type kinds.
    threshold : float, optional
        ``lam`` of the LMS/F error nonlinearity. Required for, and only
        accepted by, the LMS/F-type kinds.
    reg_param : float
        Sparsity weight ``rho`` (``>= 0``). Must be 0 for non-sparse kinds.
    reweight_factor : float, optional
        ``eps`` of the reweighted attractor. Required for, and only accepted
        by, the RZA kinds.
    label : str, optional
        Display name; defaults to the kind name.
    """

    kind: Kind
    step_size: float
    threshold: float | None = None
    reg_param: float = 0.0
    reweight_factor: float | None = None
    label: str = field(default="")

    def __post_init__(self):
        try:
            kind = Kind(self.kind)
        except ValueError:
            names = ", ".join(k.value for k in Kind)
            raise ConfigurationError(f"unknown algorithm kind {self.kind!r} (expected one of {names})", "kind")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "step_size", _positive(self.step_size, "step_size"))

        if kind.uses_threshold:
            object.__setattr__(self, "threshold", _positive(self.threshold, "threshold"))
        elif self.threshold is not None:
            raise ConfigurationError(f"threshold is not a parameter of {kind.value}", "threshold")

        if kind.is_reweighted:
            object.__setattr__(self, "reweight_factor", _positive(self.reweight_factor, "reweight_factor"))
        elif self.reweight_factor is not None:
            raise ConfigurationError(f"reweight_factor is not a parameter of {kind.value}", "reweight_factor")

        rho = float(self.reg_param)
        if not np.isfinite(rho) or rho < 0:
            raise ConfigurationError(f"reg_param must be finite and >= 0, got {rho!r}", "reg_param")
        if rho != 0 and not kind.is_sparse:
            raise ConfigurationError(f"reg_param is not a parameter of {kind.value}", "reg_param")
        object.__setattr__(self, "reg_param", rho)

        if not self.label:
            object.__setattr__(self, "label", kind.value)

    @property
    def attractor_strength(self) -> float:
        """Per-step zero-attractor magnitude ``gamma`` (0 for non-sparse kinds)."""
        if not self.kind.is_sparse:
            return 0.0
        if self.kind.is_reweighted:
            return self.step_size * self.reg_param / self.reweight_factor
        return self.step_size * self.reg_param

    def with_value(self, name: str, value: float) -> "AlgorithmParams":
        """Copy with one hyperparameter replaced (validated)."""
        if name not in ("step_size", "threshold", "reg_param", "reweight_factor"):
            raise ConfigurationError(f"{name!r} is not a tunable parameter", "parameter")
        fields = dict(
            kind=self.kind,
            step_size=self.step_size,
            threshold=self.threshold,
            reg_param=self.reg_param,
            reweight_factor=self.reweight_factor,
            label=self.label,
        )
        fields[name] = value
        return AlgorithmParams(**fields)


@dataclass(frozen=True)
class FilterState:
    """Current estimate ``h(n)`` and the iteration counter ``n``."""

    weights: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ConfigurationError(f"weights must be a non-empty vector, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.iteration < 0:
            raise ConfigurationError("iteration must be nonnegative")

    @classmethod
    def zeros(cls, n_taps: int) -> "FilterState":
        return cls(np.zeros(n_taps))

    @property
    def n_taps(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class StepRecord:
    prediction: float
    error: float
    squared_error: float


def _window(x_window, n_taps: int) -> np.ndarray:
    x = np.asarray(x_window, dtype=float)
    if x.shape != (n_taps,):
        raise ConfigurationError(f"regressor window has shape {x.shape}, filter has {n_taps} taps")
    return x


def _dot(weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Row-wise reduction; gives the same bits for a row whatever the batch size.
    return np.sum(weights * x, axis=-1)


def predict(state: FilterState, x_window) -> float:
    """Filter output ``h(n)^T x(n)``."""
    x = _window(x_window, state.n_taps)
    return float(_dot(state.weights, x))


def compute_error(y: float, prediction: float) -> StepRecord:
    e = y - prediction
    return StepRecord(prediction=prediction, error=e, squared_error=e * e)


def sign_vector(v) -> np.ndarray:
    """Componentwise sign with ``sgn(0) = 0`` and no dead zone."""
    return np.sign(np.asarray(v, dtype=float)).astype(np.int64)


def variable_step_gain(squared_error, threshold):
    """Factor ``e^2 / (e^2 + lam)`` scaling the LMS/F step relative to LMS."""
    return squared_error / (squared_error + threshold)


def increment(params: AlgorithmParams, weights, x, error) -> np.ndarray:
    """Weight increment ``h(n+1) - h(n)`` for a given a-priori error.

    ``weights`` and ``x`` have shape ``(..., N)`` and ``error`` shape ``(...)``.
    """
    kind = params.kind
    mu = params.step_size
    e = np.asarray(error, dtype=float)[..., None]

    if kind in (Kind.LMS, Kind.ZA_LMS, Kind.RZA_LMS):
        inc = (mu * e) * x
    elif kind is Kind.LMF:
        inc = (mu * e**3) * x
    else:
        inc = (mu * e**3 / (e * e + params.threshold)) * x

    gamma = params.attractor_strength
    if gamma != 0.0:
        attractor = gamma * np.sign(weights)
        if kind.is_reweighted:
            attractor = attractor / (1.0 + params.reweight_factor * np.abs(weights))
        inc = inc - attractor
    return inc


def apply_update(params: AlgorithmParams, weights, x, y):
    """Advance weights by one sample; returns ``(new_weights, prediction, error)``.

    Works on a single filter (``weights`` of shape ``(N,)``) or on a batch of
    independent filters (shape ``(B, N)``).
    """
    prediction = _dot(weights, x)
    error = y - prediction
    return weights + increment(params, weights, x, error), prediction, error


def _advance(state: FilterState, x_window, y: float, params: AlgorithmParams, expected: Kind):
    if params.kind is not expected:
        raise ConfigurationError(f"{expected.value} step called with {params.kind.value} parameters", "kind")
    x = _window(x_window, state.n_taps)
    with np.errstate(over="ignore", invalid="ignore"):
        new, prediction, error = apply_update(params, state.weights, x, float(y))
    if not np.all(np.isfinite(new)):
        raise NumericalDivergenceError(params.label, state.iteration)
    record = compute_error(float(y), float(prediction))
    return FilterState(new, state.iteration + 1), record


def lms_step(state, x_window, y, params):
    """``h + mu * e * x``."""
    return _advance(state, x_window, y, params, Kind.LMS)


def lmf_step(state, x_window, y, params):
    """``h + mu * e**3 * x``. Unstable for large errors or inputs."""
    return _advance(state, x_window, y, params, Kind.LMF)


def lmsf_step(state, x_window, y, params):
    """``h + mu * e**3 * x / (e**2 + lam)``.

    Behaves like LMF with step ``mu / lam`` when ``e**2 << lam`` and like LMS
    with step ``mu`` when ``e**2 >> lam``.
    """
    return _advance(state, x_window, y, params, Kind.LMSF)


def za_lms_step(state, x_window, y, params):
    return _advance(state, x_window, y, params, Kind.ZA_LMS)


def rza_lms_step(state, x_window, y, params):
    return _advance(state, x_window, y, params, Kind.RZA_LMS)


def za_lmsf_step(state, x_window, y, params):
    """LMS/F step minus ``mu * rho * sgn(h)``."""
    return _advance(state, x_window, y, params, Kind.ZA_LMSF)


def rza_lmsf_step(state, x_window, y, params):
    """LMS/F step minus ``(mu * rho / eps) * sgn(h) / (1 + eps * |h|)``."""
    return _advance(state, x_window, y, params, Kind.RZA_LMSF)


_STEPS = {
    Kind.LMS: lms_step,
    Kind.LMF: lmf_step,
    Kind.LMSF: lmsf_step,
    Kind.ZA_LMS: za_lms_step,
    Kind.RZA_LMS: rza_lms_step,
    Kind.ZA_LMSF: za_lmsf_step,
    Kind.RZA_LMSF: rza_lmsf_step,
}


def step(state: FilterState, x_window, y: float, params: AlgorithmParams):
    """Dispatch to the update matching ``params.kind``."""
    try:
        fn = _STEPS[Kind(params.kind)]
    except (ValueError, KeyError):
        raise ConfigurationError(f"unknown algorithm kind {params.kind!r}", "kind")
    return fn(state, x_window, y, params)


def cost_lmsf(e, threshold):
    """``e**2/2 - (lam/2) * ln(e**2 + lam)``."""
    e = np.asarray(e, dtype=float)
    return 0.5 * e * e - 0.5 * threshold * np.log(e * e + threshold)


def cost_za(e, threshold, reg_param, h):
    return cost_lmsf(e, threshold) + reg_param * np.sum(np.abs(h))


def cost_rza(e, threshold, reg_param, reweight_factor, h):
    """LMS/F cost plus ``(rho / eps**2) * sum(ln(1 + eps * |h_i|))``.

    The penalty is normalised so that ``mu`` times its gradient is exactly the
    reweighted attractor ``(mu * rho / eps) * sgn(h) / (1 + eps * |h|)``.
    """
    eps = reweight_factor
    penalty = np.sum(np.log1p(eps * np.abs(h)))
    return cost_lmsf(e, threshold) + (reg_param / eps**2) * penalty
