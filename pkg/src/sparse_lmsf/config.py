"""JSON config documents <-> :class:`ExperimentConfig`.

Validation is strict: unknown keys, wrong types and parameters that do not
belong to an algorithm kind are rejected with the offending key path, so a
mistyped hyperparameter name cannot silently fall back to a default.
"""

from __future__ import annotations

import json
import math
import numbers
from pathlib import Path

from .algorithms import AlgorithmParams, Kind
from .errors import ConfigurationError
from .experiments import ExperimentConfig, SweepSpec

__all__ = ["load_config", "parse_config", "config_to_dict", "dump_config"]

_TOP_REQUIRED = ("n_taps", "sparsity", "snr_db", "iterations", "trials", "seed", "algorithms")
_TOP_OPTIONAL = ("sweep", "steady_window")
_ALG_REQUIRED = ("kind", "step_size", "label")
_ALG_OPTIONAL = ("threshold", "reg_param", "reweight_factor")
_SWEEP_KEYS = ("algorithm_label", "parameter", "grid")


def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigurationError("expected a JSON object", path or "<root>")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigurationError(f"unknown key {key!r}", _join(path, key))
    for key in required:
        if key not in obj:
            raise ConfigurationError(f"missing required key {key!r}", _join(path, key))


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"expected an integer, got {value!r}", path)
    return value


def _num(value, path):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"expected a number, got {value!r}", path)
    return float(value)


def _algorithm(obj, path) -> AlgorithmParams:
    _check_keys(obj, path, _ALG_REQUIRED, _ALG_OPTIONAL)
    kind = obj["kind"]
    if not isinstance(kind, str) or kind not in Kind.__members__:
        raise ConfigurationError(
            f"unknown algorithm kind {kind!r} (expected one of {', '.join(Kind.__members__)})",
            _join(path, "kind"))
    kind = Kind[kind]
    label = obj["label"]
    if not isinstance(label, str) or not label:
        raise ConfigurationError("label must be a non-empty string", _join(path, "label"))
    if kind.is_sparse and "reg_param" not in obj:
        raise ConfigurationError(f"missing required key 'reg_param' for {kind.value}", _join(path, "reg_param"))

    kwargs = {"kind": kind, "label": label, "step_size": _num(obj["step_size"], _join(path, "step_size"))}
    for key in _ALG_OPTIONAL:
        if key in obj:
            kwargs[key] = _num(obj[key], _join(path, key))
    try:
        return AlgorithmParams(**kwargs)
    except ConfigurationError as exc:
        raise ConfigurationError(exc.reason, _join(path, exc.key_path or "")) from None


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a decoded JSON document and build the config."""
    _check_keys(doc, "", _TOP_REQUIRED, _TOP_OPTIONAL)
    algs = doc["algorithms"]
    if not isinstance(algs, list) or not algs:
        raise ConfigurationError("expected a non-empty array", "algorithms")
    algorithms = tuple(_algorithm(a, f"algorithms[{i}]") for i, a in enumerate(algs))

    sweep = None
    if "sweep" in doc:
        s = doc["sweep"]
        _check_keys(s, "sweep", _SWEEP_KEYS)
        if not isinstance(s["grid"], list) or not s["grid"]:
            raise ConfigurationError("expected a non-empty array", "sweep.grid")
        grid = tuple(_num(v, f"sweep.grid[{j}]") for j, v in enumerate(s["grid"]))
        if not isinstance(s["algorithm_label"], str):
            raise ConfigurationError("expected a string", "sweep.algorithm_label")
        if not isinstance(s["parameter"], str):
            raise ConfigurationError("expected a string", "sweep.parameter")
        sweep = SweepSpec(s["algorithm_label"], s["parameter"], grid)

    steady = doc.get("steady_window")
    if steady is not None:
        steady = _int(steady, "steady_window")

    return ExperimentConfig(
        n_taps=_int(doc["n_taps"], "n_taps"),
        sparsity=_int(doc["sparsity"], "sparsity"),
        snr_db=_num(doc["snr_db"], "snr_db"),
        n_iterations=_int(doc["iterations"], "iterations"),
        n_trials=_int(doc["trials"], "trials"),
        master_seed=_int(doc["seed"], "seed"),
        algorithms=algorithms,
        sweep=sweep,
        steady_window=steady,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON in {path}: {exc}") from None
    return parse_config(doc)


def config_to_dict(config: ExperimentConfig) -> dict:
    algs = []
    for a in config.algorithms:
        d = {"kind": a.kind.value, "label": a.label, "step_size": a.step_size}
        if a.threshold is not None:
            d["threshold"] = a.threshold
        if a.kind.is_sparse:
            d["reg_param"] = a.reg_param
        if a.reweight_factor is not None:
            d["reweight_factor"] = a.reweight_factor
        algs.append(d)
    doc = {
        "n_taps": config.n_taps,
        "sparsity": config.sparsity,
        "snr_db": config.snr_db,
        "iterations": config.n_iterations,
        "trials": config.n_trials,
        "seed": config.master_seed,
        "algorithms": algs,
    }
    if config.sweep is not None:
        doc["sweep"] = {
            "algorithm_label": config.sweep.algorithm_label,
            "parameter": config.sweep.parameter,
            "grid": list(config.sweep.grid),
        }
    if config.steady_window is not None:
        doc["steady_window"] = config.steady_window
    return doc


def dump_config(config: ExperimentConfig) -> str:
    doc = config_to_dict(config)
    allow_nan = math.isinf(config.snr_db)
    return json.dumps(doc, indent=2, allow_nan=allow_nan) + "\n"
