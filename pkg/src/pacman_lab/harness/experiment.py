"""Experiment orchestration: seeded repetitions, aggregation, file outputs.

Each run derives two independent random streams from its seed, one for the
agent (planner sampling or action selection) and one for the feedback oracle,
so disabling feedback does not perturb the agent's draws. Outputs are plain
CSV: one returns file per run, an aggregate file with per-episode mean and
population variance, a per-step audit log, and a canonical config echo.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .. import baselines
from ..actor_critic import PolicyParams, ValueParams
from ..feedback import build_scenario, oracle_feedback
from .config import ExperimentConfig, render_config
from .episodes import (
    EpisodeHooks,
    TabularPolicyAdapter,
    build_problem,
    run_model_free_episode,
    run_pacman_episode,
)

LEARNERS = {
    "ac_hf": baselines.ACHFLearner,
    "tamer_rl": baselines.TamerRLLearner,
    "bql_shaping": baselines.BQLShapingLearner,
}


@dataclass
class RunStats:
    seed: int
    timeouts: int = 0
    improper_pickups: int = 0
    feedback_steps: int = 0
    delta_steps: int = 0


@dataclass
class LearningCurve:
    """Per-episode returns for every run plus the aggregate curves."""

    returns: np.ndarray  # (runs, episodes)
    mean: np.ndarray
    variance: np.ndarray
    seeds: tuple[int, ...]
    stats: list[RunStats] = field(default_factory=list)


def aggregate_curves(raw) -> tuple[np.ndarray, np.ndarray]:
    """Per-episode sample mean and population variance across runs."""
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 2:
        raise ValueError("runs must be equal-length sequences")
    return arr.mean(axis=0), arr.var(axis=0)


def make_oracle_feedback_fn(scenario, rng):
    def fn(episode, step, s, a):
        return oracle_feedback(scenario, s, a, rng, episode, step)

    return fn


def run_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(agent, feedback) generators derived from one run seed."""
    children = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(children[0]), np.random.default_rng(children[1])


def _fmt(x: float) -> str:
    return repr(float(x))


def run_experiment(
    config: ExperimentConfig,
    output: str | None = None,
    hooks: EpisodeHooks | None = None,
) -> LearningCurve:
    env = config.make_env()
    maxstamp = config.resolved_maxstamp(env)
    hyper = config.hyper()
    out_dir = output if output is not None else config.output
    log = []

    scenario = None
    if config.feedback == "oracle":
        scenario = build_scenario(env, config.intent, config.case)

    returns = np.zeros((config.runs, config.maxepisode))
    stats: list[RunStats] = []
    step_rows_per_run: list[list[str]] = []

    wall_start = time.perf_counter()
    for run_i, seed in enumerate(config.seeds):
        agent_rng, feedback_rng = run_streams(seed)
        feedback_fn = (
            make_oracle_feedback_fn(scenario, feedback_rng) if scenario else None
        )
        run_stats = RunStats(seed)
        rows: list[str] = []

        if config.algorithm == "pacman":
            policy = PolicyParams(env.n_states, len(env.actions))
            value = ValueParams(env.n_states)
            value.v.fill(config.resolved_v_init())
            problem = build_problem(env, TabularPolicyAdapter(env, policy))
            for episode in range(config.maxepisode):
                result = run_pacman_episode(
                    env, policy, value, feedback_fn, hyper, maxstamp,
                    agent_rng, episode, problem, hooks,
                )
                _tally(returns, rows, run_i, episode, result, run_stats, config)
        else:
            learner = LEARNERS[config.algorithm](
                env.n_states,
                len(env.actions),
                hyper,
                **(
                    {"v_init": config.resolved_v_init()}
                    if config.algorithm == "ac_hf"
                    else {"weights": config.weights(), "epsilon": config.epsilon}
                ),
            )
            for episode in range(config.maxepisode):
                result = run_model_free_episode(
                    env, learner, feedback_fn, agent_rng, episode,
                    env.episode_cap, hooks,
                )
                _tally(returns, rows, run_i, episode, result, run_stats, config)

        stats.append(run_stats)
        step_rows_per_run.append(rows)
        log.append(
            f"run {run_i} seed {seed}: mean return "
            f"{returns[run_i].mean():.3f}, timeouts {run_stats.timeouts}, "
            f"improper pickups {run_stats.improper_pickups}"
        )

    mean, variance = aggregate_curves(returns)
    curve = LearningCurve(returns, mean, variance, config.seeds, stats)

    if out_dir is not None:
        _write_outputs(
            out_dir, config, maxstamp, curve, step_rows_per_run,
            log, time.perf_counter() - wall_start,
        )
    return curve


def _tally(returns, rows, run_i, episode, result, run_stats, config):
    returns[run_i, episode] = result.episode_return
    run_stats.timeouts += int(result.timeout)
    run_stats.improper_pickups += result.improper_pickups
    for r in result.records:
        if r.used == "feedback":
            run_stats.feedback_steps += 1
        else:
            run_stats.delta_steps += 1
        if config.log_steps:
            rows.append(
                f"{r.episode},{r.step},{r.state},{r.action},{_fmt(r.reward)},{r.used}"
            )


def _write_outputs(out_dir, config, maxstamp, curve, step_rows_per_run, log, wall):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_config(config, maxstamp))
    for run_i in range(config.runs):
        path = os.path.join(out_dir, f"run_{run_i:02d}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("episode,return\n")
            for episode in range(config.maxepisode):
                fh.write(f"{episode},{_fmt(curve.returns[run_i, episode])}\n")
        if config.log_steps:
            path = os.path.join(out_dir, f"steps_{run_i:02d}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write("episode,step,state,action,reward,used\n")
                fh.write("\n".join(step_rows_per_run[run_i]))
                if step_rows_per_run[run_i]:
                    fh.write("\n")
    with open(os.path.join(out_dir, "aggregate.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("episode,mean,variance\n")
        for episode in range(config.maxepisode):
            fh.write(
                f"{episode},{_fmt(curve.mean[episode])},{_fmt(curve.variance[episode])}\n"
            )
    with open(os.path.join(out_dir, "run.log"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(log) + f"\nwall seconds: {wall:.2f}\n")
