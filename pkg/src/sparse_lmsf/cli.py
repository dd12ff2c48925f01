"""Command-line front end.

    sparse-lmsf compare CONFIG -o DIR [--threads N] [--seed S]
    sparse-lmsf sweep   CONFIG -o DIR [--threads N] [--seed S]
    sparse-lmsf presets [NAME]

Exit codes: 0 success, 2 configuration error, 3 divergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_to_dict, dump_config, load_config
from .errors import ConfigurationError, DivergenceError
from .experiments import compare_algorithms, sweep_parameter
from .presets import preset, preset_names

log = logging.getLogger("sparse_lmsf")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def _fmt(v: float) -> str:
    # repr gives the shortest string that round-trips to the same double.
    return repr(float(v))


def _db(v: float) -> float:
    return 10.0 * math.log10(v) if v > 0 else -math.inf


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def curves_csv(curves: dict) -> str:
    labels = list(curves)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["iteration"]
    for label in labels:
        header += [label, f"{label}_dB"]
    w.writerow(header)
    n = len(next(iter(curves.values()))) if curves else 0
    cols = [np.asarray(curves[k].values) for k in labels]
    for i in range(n):
        row = [str(i)]
        for c in cols:
            row += [_fmt(c[i]), _fmt(_db(c[i]))]
        w.writerow(row)
    return buf.getvalue()


def sweep_csv(result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "steady_state_msd", "steady_state_msd_dB"])
    for v, m in zip(result.grid, result.steady_state_msd):
        w.writerow([_fmt(v), _fmt(m), _fmt(_db(m))])
    return buf.getvalue()


def _manifest(command, config, started, outputs, divergence, threads, extra=None) -> str:
    doc = {
        "tool": "sparse-lmsf",
        "version": __version__,
        "command": command,
        "master_seed": config.master_seed,
        "threads": threads,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
        "divergence": {label: {str(t): it for t, it in trials.items()}
                       for label, trials in divergence.items()},
        "config": config_to_dict(config),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _prepare(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace(master_seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return config, out


def cmd_compare(args) -> int:
    config, out = _prepare(args)
    started = datetime.now(timezone.utc).isoformat()
    divergence = {}
    try:
        curves = compare_algorithms(config, threads=args.threads)
    except DivergenceError as exc:
        curves, divergence = exc.partial, exc.reports
        log.error("divergence: %s", exc)

    outputs = []
    if curves:
        atomic_write(out / "curves.csv", curves_csv(curves))
        outputs.append("curves.csv")
    outputs.append("manifest.json")
    atomic_write(out / "manifest.json",
                 _manifest("compare", config, started, outputs, divergence, args.threads))
    if divergence:
        return EXIT_DIVERGED
    for label, curve in curves.items():
        print(f"{label}: steady-state MSD {_db(float(np.mean(curve.values[-config.steady_window_or_default:]))):.3f} dB")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config, out = _prepare(args)
    if config.sweep is None:
        raise ConfigurationError("config has no sweep block", "sweep")
    started = datetime.now(timezone.utc).isoformat()
    spec = config.sweep
    try:
        result = sweep_parameter(config, spec.algorithm_label, spec.parameter, spec.grid, threads=args.threads)
    except DivergenceError as exc:
        log.error("divergence: %s", exc)
        atomic_write(out / "manifest.json",
                     _manifest("sweep", config, started, ["manifest.json"], exc.reports, args.threads))
        return EXIT_DIVERGED

    atomic_write(out / "sweep.csv", sweep_csv(result))
    extra = {"best": {"parameter": spec.parameter, "value": result.best_value,
                      "steady_state_msd": float(result.steady_state_msd[result.best_index])}}
    atomic_write(out / "manifest.json",
                 _manifest("sweep", config, started, ["sweep.csv", "manifest.json"], {}, args.threads, extra))
    print(f"best {spec.parameter} = {_fmt(result.best_value)} "
          f"(steady-state MSD {_db(result.steady_state_msd[result.best_index]):.3f} dB)")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.name is None:
        print("\n".join(preset_names()))
        return EXIT_OK
    sys.stdout.write(dump_config(preset(args.name)))
    return EXIT_OK


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-lmsf",
        description="Monte Carlo experiments for LMS/F and zero-attracting sparse adaptive filters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON experiment config")
    common.add_argument("-o", "--out", required=True, help="output directory")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--seed", type=_u64, default=None, help="override the config's master seed")

    p = sub.add_parser("compare", parents=[common], help="averaged MSD learning curves -> curves.csv")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("sweep", parents=[common], help="steady-state MSD over a parameter grid -> sweep.csv")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("presets", help="print a named preset config (or list presets)")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        log.error("configuration error: %s", exc)
        if args.command == "presets":
            log.error("available presets: %s", ", ".join(preset_names()))
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
