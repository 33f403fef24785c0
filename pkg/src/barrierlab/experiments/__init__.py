"""Reproducible Monte Carlo experiments and their reports."""

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, load_config
from .harness import InvariantViolation, Report, TrialRecord, group_seed, run_blocks
from .runs import (
    default_sphere_resolution,
    run_barrier_stability,
    run_bounds,
    run_experiment,
    run_large_components,
    run_nests,
    run_separation,
    run_supnorm_tail,
    run_univariate_roots,
    separated_points,
)
from .stats import MeanEstimate, Proportion, mean_stderr, wilson_interval

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "InvariantViolation",
    "Report",
    "TrialRecord",
    "group_seed",
    "run_blocks",
    "run_experiment",
    "run_large_components",
    "run_nests",
    "run_separation",
    "run_supnorm_tail",
    "run_univariate_roots",
    "run_bounds",
    "run_barrier_stability",
    "separated_points",
    "default_sphere_resolution",
    "wilson_interval",
    "mean_stderr",
    "Proportion",
    "MeanEstimate",
]
