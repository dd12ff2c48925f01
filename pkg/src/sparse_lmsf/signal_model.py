"""Ground truth for channel-estimation experiments.

Sparse FIR channels, white Gaussian training excitation, AWGN and the
observation ``y(n) = h^T x(n) + z(n)``, plus the squared-deviation metric.
All randomness comes from a caller-owned ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SparseChannel",
    "RegressorWindow",
    "NoiseModel",
    "generate_sparse_channel",
    "snr_to_noise_variance",
    "noise_variance_to_snr",
    "next_training_sample",
    "push",
    "observe",
    "squared_deviation",
]


@dataclass(frozen=True)
class SparseChannel:
    """Unit-energy FIR channel with ``sparsity`` nonzero taps."""

    taps: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "support", tuple(sorted(int(i) for i in self.support)))

    @property
    def n_taps(self) -> int:
        return self.taps.size

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def __array__(self, dtype=None, copy=None):
        return self.taps if dtype is None else self.taps.astype(dtype)


@dataclass(frozen=True)
class RegressorWindow:
    """The last ``N`` training samples, newest first: ``[x(n), ..., x(n-N+1)]``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1 or s.size == 0:
            raise ConfigurationError(f"window must be a non-empty vector, got shape {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def zeros(cls, n_taps: int) -> "RegressorWindow":
        return cls(np.zeros(n_taps))

    def __len__(self):
        return self.samples.size

    def __array__(self, dtype=None, copy=None):
        return self.samples if dtype is None else self.samples.astype(dtype)


@dataclass(frozen=True)
class NoiseModel:
    variance: float

    def __post_init__(self):
        if not (self.variance >= 0) or math.isinf(self.variance):
            raise ConfigurationError(f"noise variance must be finite and >= 0, got {self.variance!r}")

    @classmethod
    def from_snr(cls, snr_db: float) -> "NoiseModel":
        return cls(snr_to_noise_variance(snr_db))


def generate_sparse_channel(n_taps: int, sparsity: int, rng: np.random.Generator) -> SparseChannel:
    """Draw a random ``sparsity``-sparse channel of length ``n_taps``.

    Support indices are uniform without replacement; nonzero values are
    i.i.d. standard normal, then the vector is scaled to unit l2 norm.
    """
    if n_taps < 1:
        raise ConfigurationError(f"n_taps must be >= 1, got {n_taps}", "n_taps")
    if not 1 <= sparsity <= n_taps:
        raise ConfigurationError(f"sparsity out of range: K={sparsity} with N={n_taps}", "sparsity")
    support = rng.choice(n_taps, size=sparsity, replace=False)
    values = rng.standard_normal(sparsity)
    taps = np.zeros(n_taps)
    taps[support] = values / np.linalg.norm(values)
    return SparseChannel(taps, tuple(support))


def snr_to_noise_variance(snr_db: float) -> float:
    """Noise variance for unit signal power: ``10 ** (-snr_db / 10)``."""
    return 10.0 ** (-snr_db / 10.0)


def noise_variance_to_snr(variance: float) -> float:
    return 10.0 * math.log10(1.0 / variance)


def next_training_sample(rng: np.random.Generator) -> float:
    return float(rng.standard_normal())


def push(window: RegressorWindow, sample: float) -> RegressorWindow:
    s = window.samples
    return RegressorWindow(np.concatenate(([sample], s[:-1])))


def observe(channel: SparseChannel, window: RegressorWindow, noise: NoiseModel,
            rng: np.random.Generator) -> float:
    """Noisy channel output ``h^T x(n) + z(n)``, ``z ~ N(0, variance)``.

    One standard normal is drawn from ``rng`` per call, even when the variance
    is zero, so the noise stream stays aligned across SNR settings.
    """
    x = np.asarray(window, dtype=float)
    if x.shape != channel.taps.shape:
        raise ConfigurationError(
            f"window length {x.size} does not match channel length {channel.n_taps}")
    z = rng.standard_normal() * math.sqrt(noise.variance)
    return float(np.sum(channel.taps * x)) + z


def squared_deviation(truth, estimate) -> float:
    """``||h - h_hat||_2^2``. Accepts channels, filter states or plain vectors."""
    h = np.asarray(getattr(truth, "weights", truth), dtype=float)
    g = np.asarray(getattr(estimate, "weights", estimate), dtype=float)
    if h.shape != g.shape:
        raise ConfigurationError(f"length mismatch: {h.shape} vs {g.shape}")
    d = h - g
    return float(np.sum(d * d))
