"""Command-line entry point: ``barrierlab <experiment> [flags]``.

Exit codes: 0 success, 2 invariant violation, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, load_config, run_experiment

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 3

log = logging.getLogger("barrierlab")


def _ints(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in s.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from exc


def _floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in s.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barrierlab", description="Random plane curve experiments.")
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name, help=f"run the {name} experiment")
        s.add_argument("--config", help="INI or JSON file with defaults for this run")
        s.add_argument("--d", type=_ints, help="degree(s), comma separated")
        s.add_argument("--f", type=_floats, help="scale(s) f, comma separated")
        s.add_argument("--alpha", type=float)
        s.add_argument("--epsilon", type=float)
        s.add_argument("--m", type=int, help="number of separated points")
        s.add_argument("--trials", type=int)
        s.add_argument("--seed", type=int, dest="master_seed")
        s.add_argument("--resolution", type=int)
        s.add_argument("--radius", type=float, help="disk radius for nest depth")
        s.add_argument("--kinds", help="reference kinds, e.g. P0,P1,P2")
        s.add_argument("--subspace", choices=("X0", "P2"))
        s.add_argument("--convention", choices=("half", "unit"), dest="variance_convention")
        s.add_argument("--block-size", type=int, dest="block_size")
        s.add_argument("--workers", type=int)
        s.add_argument("--out", help="output directory for trials, summary.json and report.md")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("-v", "--verbose", action="store_true")
    return p


_KEYS = ("d", "f", "alpha", "epsilon", "m", "trials", "master_seed", "resolution", "radius",
         "kinds", "subspace", "variance_convention", "block_size", "workers", "out", "format")


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    given = {k: getattr(ns, k) for k in _KEYS if getattr(ns, k) is not None}
    if ns.config:
        try:
            return load_config(ns.config, experiment=ns.experiment, **given)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    if "d" not in given:
        raise ConfigError("--d is required (or supply --config)")
    return ExperimentConfig(experiment=ns.experiment, **given)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s with %s", cfg.experiment, cfg.as_dict())
    try:
        rep = run_experiment(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out is None:
        print(rep.summary_json(), end="")
    else:
        print(json.dumps({"out": cfg.out, "violations": rep.violations}))
    for note in rep.notes:
        log.warning(note)
    if rep.violations:
        print(f"invariant violations: {rep.violations}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
