"""Experiment harness: the planner-led learning loop, baselines driver,
seeded experiment runner, and the CLI."""

from .config import ExperimentConfig, load_config, parse_config, render_config
from .episodes import (
    EpisodeHooks,
    EpisodeResult,
    StepRecord,
    TabularPolicyAdapter,
    build_problem,
    run_model_free_episode,
    run_pacman_episode,
)
from .experiment import (
    LearningCurve,
    RunStats,
    aggregate_curves,
    make_oracle_feedback_fn,
    run_experiment,
    run_streams,
)

__all__ = [
    "EpisodeHooks",
    "EpisodeResult",
    "ExperimentConfig",
    "LearningCurve",
    "RunStats",
    "StepRecord",
    "TabularPolicyAdapter",
    "aggregate_curves",
    "build_problem",
    "load_config",
    "make_oracle_feedback_fn",
    "parse_config",
    "render_config",
    "run_experiment",
    "run_model_free_episode",
    "run_pacman_episode",
    "run_streams",
]
