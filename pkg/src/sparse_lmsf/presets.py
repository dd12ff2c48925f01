"""Named experiment configurations for the reference parameter sets."""

from __future__ import annotations

import numpy as np

from .algorithms import AlgorithmParams, Kind
from .errors import ConfigurationError
from .experiments import ExperimentConfig, SweepSpec

__all__ = ["PRESETS", "preset", "preset_names"]

N_TAPS = 16
SNR_DB = 10.0
ITERATIONS = 1000
TRIALS = 1000
SEED = 1
THRESHOLD = 0.8
REWEIGHT = 20.0
# LMF is unstable at the LMS/F step sizes; this is the largest round step that
# survives 10 x 1000 trials at N=16, SNR 10 dB without a divergence.
LMF_STEP = 0.003

# (rho_ZA, rho_RZA, rho_ZAS, rho_RZAS) per sparsity
_REG = {
    2: (4e-4, 0.04, 0.008, 0.8),
    4: (2e-4, 0.02, 0.004, 0.4),
}
_ALT_RZA = {2: 0.02, 4: 0.01}


def _comparison(sparsity: int, rho_rza: float | None = None, step: float = 0.04) -> ExperimentConfig:
    za, rza, zas, rzas = _REG[sparsity]
    if rho_rza is not None:
        rza = rho_rza
    algorithms = (
        AlgorithmParams(Kind.LMS, step, label="LMS"),
        AlgorithmParams(Kind.ZA_LMS, step, reg_param=zas, label="ZA-LMS"),
        AlgorithmParams(Kind.RZA_LMS, step, reg_param=rzas, reweight_factor=REWEIGHT, label="RZA-LMS"),
        AlgorithmParams(Kind.LMF, LMF_STEP, label="LMF"),
        AlgorithmParams(Kind.LMSF, step, threshold=THRESHOLD, label="LMS/F"),
        AlgorithmParams(Kind.ZA_LMSF, step, threshold=THRESHOLD, reg_param=za, label="ZA-LMS/F"),
        AlgorithmParams(Kind.RZA_LMSF, step, threshold=THRESHOLD, reg_param=rza,
                        reweight_factor=REWEIGHT, label="RZA-LMS/F"),
    )
    return ExperimentConfig(N_TAPS, sparsity, SNR_DB, ITERATIONS, TRIALS, SEED, algorithms)


def _sweep(algorithm: AlgorithmParams, parameter: str, grid, sparsity: int = 2) -> ExperimentConfig:
    grid = tuple(float(v) for v in grid)
    return ExperimentConfig(N_TAPS, sparsity, SNR_DB, ITERATIONS, TRIALS, SEED, (algorithm,),
                            sweep=SweepSpec(algorithm.label, parameter, grid))


def _za_rho_sweep() -> ExperimentConfig:
    # mu_f = 0.05; log grid over [1e-5, 1e-2], four points per decade.
    alg = AlgorithmParams(Kind.ZA_LMSF, 0.05, threshold=THRESHOLD, reg_param=4e-4, label="ZA-LMS/F")
    return _sweep(alg, "reg_param", np.logspace(-5, -2, 13))


def _rza_rho_sweep() -> ExperimentConfig:
    alg = AlgorithmParams(Kind.RZA_LMSF, 0.05, threshold=THRESHOLD, reg_param=0.02,
                          reweight_factor=REWEIGHT, label="RZA-LMS/F")
    return _sweep(alg, "reg_param", np.logspace(-4, 0, 13))


def _rza_eps_sweep() -> ExperimentConfig:
    alg = AlgorithmParams(Kind.RZA_LMSF, 0.04, threshold=THRESHOLD, reg_param=_REG[2][1],
                          reweight_factor=REWEIGHT, label="RZA-LMS/F")
    return _sweep(alg, "reweight_factor", (1, 2, 5, 10, 15, 20, 25, 30, 40, 50))


PRESETS = {
    "table2-k2": lambda: _comparison(2),
    "table2-k4": lambda: _comparison(4),
    "fig5-sweep": _za_rho_sweep,
    "fig6-sweep": _rza_rho_sweep,
    "fig9-sweep": _rza_eps_sweep,
    "sec3c-alt": lambda: _comparison(2, rho_rza=_ALT_RZA[2]),
}


def preset_names() -> list[str]:
    return list(PRESETS)


def preset(name: str) -> ExperimentConfig:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    return factory()
