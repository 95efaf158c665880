"""Comparison learners.

Three arms besides the planner-led learner: the planner-free ablation (the
same actor-critic update with actions drawn directly from the policy every
step), and two reward-shaping baselines reconstructed on a tabular Q-learning
core: one learns a human-reinforcement model and shapes with it, the other
adds the raw feedback value to the reward when present. Both reconstructions
are labeled as such in run outputs; only the qualitative comparison matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actor_critic import (
    HyperParams,
    PolicyParams,
    TransitionSample,
    ValueParams,
    ac_update,
    action_probs,
)

EPSILON = 0.1


@dataclass
class ShapingWeights:
    """Shaping strengths and the supervised rate for the learned human model."""

    w_tamer: float = 1.0
    w_bql: float = 1.0
    tamer_lr: float = 0.2

    def __post_init__(self):
        if min(self.w_tamer, self.w_bql, self.tamer_lr) < 0:
            raise ValueError("weights must be non-negative")


class QTable:
    def __init__(self, n_states: int, n_actions: int):
        self.q = np.zeros((n_states, n_actions))


class HumanModel:
    """Learned per-(state, action) feedback predictor."""

    def __init__(self, n_states: int, n_actions: int):
        self.h = np.zeros((n_states, n_actions))


def ac_hf_step(
    policy: PolicyParams,
    value: ValueParams,
    sample: TransitionSample,
    feedback: float | None,
    hyper: HyperParams,
) -> str:
    """Identical update rule to the planner-led learner; only the acting
    differs (there is no plan). Returns which signal drove the policy update."""
    used, _ = ac_update(policy, value, sample, hyper, feedback)
    return used


def _q_update(q: QTable, sample: TransitionSample, reward: float, hyper: HyperParams):
    bootstrap = 0.0 if sample.terminal else hyper.gamma * q.q[sample.s_next].max()
    q.q[sample.s, sample.a] += hyper.alpha * (
        reward + bootstrap - q.q[sample.s, sample.a]
    )


def tamer_rl_step(
    q: QTable,
    h: HumanModel,
    sample: TransitionSample,
    feedback: float | None,
    weights: ShapingWeights,
    hyper: HyperParams,
) -> None:
    """Supervised update of the human model on feedback, then Q-learning on
    the model-shaped reward."""
    if feedback is not None:
        h.h[sample.s, sample.a] += weights.tamer_lr * (
            feedback - h.h[sample.s, sample.a]
        )
    _q_update(q, sample, sample.r + weights.w_tamer * h.h[sample.s, sample.a], hyper)


def bql_shaping_step(
    q: QTable,
    sample: TransitionSample,
    feedback: float | None,
    weights: ShapingWeights,
    hyper: HyperParams,
) -> None:
    """Q-learning on reward shifted by the raw feedback when present."""
    shaped = sample.r + (weights.w_bql * feedback if feedback is not None else 0.0)
    _q_update(q, sample, shaped, hyper)


def epsilon_greedy(q: QTable, s: int, rng, epsilon: float = EPSILON) -> int:
    """Greedy on Q with epsilon exploration; ties broken uniformly."""
    if rng.random() < epsilon:
        return int(rng.integers(0, q.q.shape[1]))
    row = q.q[s]
    best = np.flatnonzero(row == row.max())
    return int(best[rng.integers(0, len(best))])


def sample_from_policy(policy: PolicyParams, s: int, rng) -> int:
    probs = action_probs(policy, s)
    return int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))


# ---------------------------------------------------------------------------
# learner objects driven by the shared model-free episode loop


class ACHFLearner:
    """Actor-critic with human feedback, no planner."""

    algorithm = "ac_hf"

    def __init__(
        self,
        n_states: int,
        n_actions: int,
        hyper: HyperParams,
        v_init: float = 0.0,
        **_,
    ):
        self.policy = PolicyParams(n_states, n_actions)
        self.value = ValueParams(n_states)
        self.value.v.fill(v_init)
        self.hyper = hyper

    def action(self, s: int, rng) -> int:
        return sample_from_policy(self.policy, s, rng)

    def observe(self, sample: TransitionSample, feedback: float | None) -> str:
        return ac_hf_step(self.policy, self.value, sample, feedback, self.hyper)


class TamerRLLearner:
    """Q-learning shaped by a learned human-reinforcement model."""

    algorithm = "tamer_rl"

    def __init__(
        self,
        n_states: int,
        n_actions: int,
        hyper: HyperParams,
        weights: ShapingWeights | None = None,
        epsilon: float = EPSILON,
    ):
        self.q = QTable(n_states, n_actions)
        self.h = HumanModel(n_states, n_actions)
        self.hyper = hyper
        self.weights = weights or ShapingWeights()
        self.epsilon = epsilon

    def action(self, s: int, rng) -> int:
        return epsilon_greedy(self.q, s, rng, self.epsilon)

    def observe(self, sample: TransitionSample, feedback: float | None) -> str:
        tamer_rl_step(self.q, self.h, sample, feedback, self.weights, self.hyper)
        return "feedback" if feedback is not None else "delta"


class BQLShapingLearner:
    """Q-learning with additive feedback shaping."""

    algorithm = "bql_shaping"

    def __init__(
        self,
        n_states: int,
        n_actions: int,
        hyper: HyperParams,
        weights: ShapingWeights | None = None,
        epsilon: float = EPSILON,
    ):
        self.q = QTable(n_states, n_actions)
        self.hyper = hyper
        self.weights = weights or ShapingWeights()
        self.epsilon = epsilon

    def action(self, s: int, rng) -> int:
        return epsilon_greedy(self.q, s, rng, self.epsilon)

    def observe(self, sample: TransitionSample, feedback: float | None) -> str:
        bql_shaping_step(self.q, sample, feedback, self.weights, self.hyper)
        return "feedback" if feedback is not None else "delta"
