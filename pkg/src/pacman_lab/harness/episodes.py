"""Episode runners.

The planner-led episode plans once at the start (sampling availability from
the current policy), then executes the plan's actions in order; each executed
transition trains the critic on its TD error and the actor on feedback when
present. Skipped timestamps produce no environment transition and no learning
sample. The model-free loop drives the baseline learners action by action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import planner
from ..actor_critic import (
    PolicyParams,
    TransitionSample,
    ValueParams,
    ac_update,
    prob_table,
)
from ..envs import Env
from ..feedback import FeedbackEvent

FeedbackFn = Callable[[int, int, int, int], "FeedbackEvent | None"]


@dataclass
class StepRecord:
    """Audit row: one executed transition and which signal trained the actor."""

    episode: int
    step: int
    state: int
    action: int
    reward: float
    used: str  # "delta" or "feedback"


@dataclass
class EpisodeResult:
    episode_return: float
    samples: list[TransitionSample] = field(default_factory=list)
    records: list[StepRecord] = field(default_factory=list)
    planned: bool = True
    plan_length: int = 0
    timeout: bool = False
    deviated: bool = False
    improper_pickups: int = 0


@dataclass
class EpisodeHooks:
    """Callbacks for interactive sessions; all optional.

    ``gate`` runs before every environment transition and may block (pacing);
    ``on_plan`` fires after planning, ``on_step`` after each transition's
    updates have been applied.
    """

    gate: Callable[[], None] | None = None
    on_plan: Callable[[object, int], None] | None = None
    on_step: Callable[[StepRecord, object], None] | None = None


class TabularPolicyAdapter:
    """Planner-side view of a preference table: rows are softmax distributions
    indexed by the environment's state ids."""

    def __init__(self, env: Env, params: PolicyParams):
        self.env = env
        self.params = params
        self.actions = env.actions
        self._ids: dict[int, list[int]] = {}
        self._table: np.ndarray | None = None

    def invalidate(self) -> None:
        """Call when the preference table changed (once per episode)."""
        self._table = None

    def prob_matrix(self, states: Sequence, t: int):
        if self._table is None:
            self._table = prob_table(self.params)
        key = id(states)
        ids = self._ids.get(key)
        if ids is None:
            ids = [self.env.state_id_of(s) for s in states]
            self._ids = {key: ids}
        return self._table[ids]


def build_problem(env: Env, adapter: TabularPolicyAdapter) -> planner.PlanningProblem:
    states = tuple(env.world_state(s) for s in env.enumerate_states())
    return planner.PlanningProblem(
        env.initial_condition(),
        env.goal_condition(),
        env.to_action_description(),
        adapter,
        states,
    )


def run_pacman_episode(
    env: Env,
    policy: PolicyParams,
    value: ValueParams,
    feedback_fn: FeedbackFn | None,
    hyper,
    maxstamp: int,
    rng: np.random.Generator,
    episode: int = 0,
    problem: planner.PlanningProblem | None = None,
    hooks: EpisodeHooks | None = None,
) -> EpisodeResult:
    """One planner-led episode; returns the accumulated reward and audit rows.

    A planner failure within maxstamp yields a time-out episode with no
    samples and the accumulated (zero) return.
    """
    if problem is None:
        problem = build_problem(env, TabularPolicyAdapter(env, policy))
    adapter = problem.policy
    if isinstance(adapter, TabularPolicyAdapter):
        adapter.invalidate()

    plan = planner.solve(problem, maxstamp, rng)
    if hooks and hooks.on_plan:
        hooks.on_plan(plan, episode)
    if plan is None:
        return EpisodeResult(0.0, planned=False, timeout=True)

    result = EpisodeResult(0.0, planned=True, plan_length=len(plan))
    s = env.reset()
    if plan.steps and plan.steps[0].state != env.world_state(s):
        result.deviated = True
        return result
    step_index = 0
    for i, step in enumerate(plan.steps):
        if step.action is None:
            continue  # skipped timestamp: inertia, no sample, no update
        if hooks and hooks.gate:
            hooks.gate()
        a = env.actions.index(step.action)
        out = env.step(s, a)
        if hasattr(env, "is_improper_pickup") and env.is_improper_pickup(s, a):
            result.improper_pickups += 1
        sample = TransitionSample(s, a, out.reward, out.next_state, out.terminal)
        fb = feedback_fn(episode, step_index, s, a) if feedback_fn else None
        used, _ = ac_update(policy, value, sample, hyper, fb.value if fb else None)
        record = StepRecord(episode, step_index, s, a, out.reward, used)
        result.samples.append(sample)
        result.records.append(record)
        result.episode_return += out.reward
        if hooks and hooks.on_step:
            hooks.on_step(record, out)
        step_index += 1
        expected = plan.steps[i + 1].state if i + 1 < len(plan.steps) else plan.terminal
        if env.world_state(out.next_state) != expected:
            # impossible in the shipped deterministic envs, checked anyway
            result.deviated = True
            break
        if out.terminal:
            break
        s = out.next_state
    return result


def run_model_free_episode(
    env: Env,
    learner,
    feedback_fn: FeedbackFn | None,
    rng: np.random.Generator,
    episode: int = 0,
    cap: int | None = None,
    hooks: EpisodeHooks | None = None,
) -> EpisodeResult:
    """One episode of a learner that picks an action every environment step.

    Hitting the step cap ends the episode without marking the last sample
    terminal (no terminal bootstrap fabrication).
    """
    cap = cap if cap is not None else env.episode_cap
    result = EpisodeResult(0.0)
    s = env.reset()
    for step_index in range(cap):
        if hooks and hooks.gate:
            hooks.gate()
        a = learner.action(s, rng)
        out = env.step(s, a)
        if hasattr(env, "is_improper_pickup") and env.is_improper_pickup(s, a):
            result.improper_pickups += 1
        sample = TransitionSample(s, a, out.reward, out.next_state, out.terminal)
        fb = feedback_fn(episode, step_index, s, a) if feedback_fn else None
        used = learner.observe(sample, fb.value if fb else None)
        record = StepRecord(episode, step_index, s, a, out.reward, used)
        result.samples.append(sample)
        result.records.append(record)
        result.episode_return += out.reward
        if hooks and hooks.on_step:
            hooks.on_step(record, out)
        if out.terminal:
            break
        s = out.next_state
    return result
