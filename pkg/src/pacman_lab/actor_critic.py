"""Tabular actor-critic.

The actor is a softmax policy over a per-state preference table, the critic a
state-value table. Each observed transition yields a TD error (the advantage
estimate) that always trains the critic; the policy update consumes the TD
error unless a human feedback value is present, in which case the feedback
replaces it for that step only.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

DELTA = "delta"
FEEDBACK = "feedback"


@dataclass
class HyperParams:
    """Learning rates and discount; defaults recorded in every results file."""

    alpha: float = 0.1
    beta: float = 0.1
    gamma: float = 0.95

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("learning rates must be positive")
        if not 0 <= self.gamma < 1:
            raise ValueError("discount must satisfy 0 <= gamma < 1")


@dataclass(frozen=True)
class TransitionSample:
    """One environment transition (s, a, r, s') plus a terminal marker."""

    s: int
    a: int
    r: float
    s_next: int
    terminal: bool = False


class PolicyParams:
    """Preference table theta, one row per state; softmax gives the policy."""

    def __init__(self, n_states: int, n_actions: int):
        self.theta = np.zeros((n_states, n_actions))

    @property
    def n_states(self) -> int:
        return self.theta.shape[0]

    @property
    def n_actions(self) -> int:
        return self.theta.shape[1]


class ValueParams:
    """State-value table."""

    def __init__(self, n_states: int):
        self.v = np.zeros(n_states)


def action_probs(policy: PolicyParams, s: int) -> np.ndarray:
    """Softmax over the preferences at s; strictly positive, sums to one."""
    row = policy.theta[s]
    z = np.exp(row - row.max())
    return z / z.sum()


def prob_table(policy: PolicyParams) -> np.ndarray:
    """Softmax of every row at once (used when sampling availability)."""
    z = np.exp(policy.theta - policy.theta.max(axis=1, keepdims=True))
    return z / z.sum(axis=1, keepdims=True)


def td_error(sample: TransitionSample, value: ValueParams, gamma: float) -> float:
    """r + gamma * V(s') - V(s); the bootstrap term is zero on terminal steps."""
    bootstrap = 0.0 if sample.terminal else gamma * value.v[sample.s_next]
    return float(sample.r + bootstrap - value.v[sample.s])


def update_value(value: ValueParams, s: int, delta: float, alpha: float) -> ValueParams:
    value.v[s] += alpha * delta
    return value


def grad_log_policy(policy: PolicyParams, s: int, a: int) -> np.ndarray:
    """Gradient of log pi(a|s) w.r.t. the preferences at s: 1{a'=a} - pi(a'|s)."""
    grad = -action_probs(policy, s)
    grad[a] += 1.0
    return grad


def update_policy(
    policy: PolicyParams, s: int, a: int, advantage: float, beta: float
) -> PolicyParams:
    policy.theta[s] += beta * advantage * grad_log_policy(policy, s, a)
    return policy


def ac_update(
    policy: PolicyParams,
    value: ValueParams,
    sample: TransitionSample,
    hyper: HyperParams,
    feedback: float | None = None,
) -> tuple[str, float]:
    """One actor-critic step with feedback substitution.

    The critic always trains on the TD error; the actor trains on the
    feedback value when one is present, on the TD error otherwise. Returns
    which signal drove the policy update and the TD error.
    """
    delta = td_error(sample, value, hyper.gamma)
    update_value(value, sample.s, delta, hyper.alpha)
    if feedback is None:
        update_policy(policy, sample.s, sample.a, delta, hyper.beta)
        return DELTA, delta
    update_policy(policy, sample.s, sample.a, float(feedback), hyper.beta)
    return FEEDBACK, delta


# ---------------------------------------------------------------------------
# parameter snapshots: plain (state, action, value) triples; value rows use
# "-" in the action column


def export_tables(policy: PolicyParams, value: ValueParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_tables(policy, value, fh)


def write_tables(policy: PolicyParams, value: ValueParams, fh: io.TextIOBase) -> None:
    fh.write(f"# pacman-lab tables v1 states={policy.n_states} actions={policy.n_actions}\n")
    for s in range(policy.n_states):
        for a in range(policy.n_actions):
            fh.write(f"{s} {a} {float(policy.theta[s, a])!r}\n")
    for s in range(value.v.shape[0]):
        fh.write(f"{s} - {float(value.v[s])!r}\n")


def import_tables(path: str) -> tuple[PolicyParams, ValueParams]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        fields = dict(
            part.split("=") for part in header.split() if "=" in part
        )
        n_states, n_actions = int(fields["states"]), int(fields["actions"])
        policy = PolicyParams(n_states, n_actions)
        value = ValueParams(n_states)
        for line in fh:
            s, a, val = line.split()
            if a == "-":
                value.v[int(s)] = float(val)
            else:
                policy.theta[int(s), int(a)] = float(val)
    return policy, value
