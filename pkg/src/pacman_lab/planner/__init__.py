"""Sample-based symbolic planning.

A planning problem couples an action description with a stochastic policy.
At each horizon k one action per (state, timestamp) is sampled from the
policy; the accumulated facts constrain a timestamped search in which the
agent either executes the single sampled action for its current state or
skips the timestamp (state persists by inertia). Horizons grow until a plan
reaching the goal is found or ``maxstamp`` is exhausted.

Returned plans minimize the number of executed actions, tie-broken toward
the earliest action timestamps, and validate independently via
:func:`validate_plan`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Protocol, Sequence

import numpy as np

from ..action_lang import (
    ActionDescription,
    FluentAtom,
    WorldState,
    apply,
    state_from_condition,
)
from .backend import active_backend, find_act_flags

__all__ = [
    "AvailabilityFragment",
    "AvailabilitySample",
    "Plan",
    "PlanStep",
    "PlanningPolicy",
    "PlanningProblem",
    "PlannerError",
    "PlanValidationError",
    "UniformPolicy",
    "active_backend",
    "parse_planning_file",
    "plan_search",
    "reachable_states",
    "render_timestamped_program",
    "sample_availability",
    "solve",
    "validate_plan",
]

Condition = tuple[FluentAtom, ...]


class PlannerError(Exception):
    """Planner-level usage or consistency error."""


class PlanValidationError(PlannerError):
    """A plan failed the independent step-by-step validation."""


class PlanningPolicy(Protocol):
    """Stochastic policy handle: a distribution over actions per state."""

    actions: Sequence[str]

    def prob_matrix(self, states: Sequence[WorldState], t: int) -> np.ndarray:
        """Row-stochastic (len(states), len(actions)) matrix of action
        probabilities; may depend on the timestamp for scripted policies."""
        ...


class UniformPolicy:
    """Uniform distribution over a fixed action set, for any state."""

    def __init__(self, actions: Sequence[str]):
        self.actions = tuple(actions)

    def prob_matrix(self, states: Sequence[WorldState], t: int) -> np.ndarray:
        return np.full((len(states), len(self.actions)), 1.0 / len(self.actions))


@dataclass(frozen=True, eq=False)
class AvailabilityFragment:
    """Sampled availability for one timestamp: one action per state."""

    t: int
    states: tuple[WorldState, ...]
    action_ids: np.ndarray
    actions: tuple[str, ...]

    def items(self) -> Iterator[tuple[WorldState, str]]:
        for state, aid in zip(self.states, self.action_ids):
            yield state, self.actions[int(aid)]


class AvailabilitySample:
    """Accumulated availability facts: (timestamp, state) -> action."""

    def __init__(self):
        self._by_t: dict[int, dict[WorldState, str]] = {}

    @classmethod
    def from_facts(
        cls, facts: Mapping[tuple[int, WorldState], str]
    ) -> "AvailabilitySample":
        sample = cls()
        for (t, state), action in facts.items():
            sample.add_fact(t, state, action)
        return sample

    def add_fact(self, t: int, state: WorldState, action: str) -> None:
        row = self._by_t.setdefault(t, {})
        if row.get(state, action) != action:
            raise PlannerError(f"two actions sampled for timestamp {t}, state {state}")
        row[state] = action

    def add_fragment(self, fragment: AvailabilityFragment) -> None:
        for state, action in fragment.items():
            self.add_fact(fragment.t, state, action)

    def action_for(self, t: int, state: WorldState) -> str | None:
        return self._by_t.get(t, {}).get(state)

    @property
    def timestamps(self) -> list[int]:
        return sorted(self._by_t)

    def facts(self) -> Iterator[tuple[int, WorldState, str]]:
        for t in sorted(self._by_t):
            for state, action in self._by_t[t].items():
                yield t, state, action

    def __len__(self) -> int:
        return sum(len(row) for row in self._by_t.values())


@dataclass(frozen=True)
class PlanStep:
    """One plan timestamp: the state entering it and the action taken, if any."""

    timestamp: int
    state: WorldState
    action: str | None


@dataclass(frozen=True)
class Plan:
    """Timestamped plan; steps with ``action=None`` are skipped timestamps."""

    steps: tuple[PlanStep, ...]
    terminal: WorldState

    @property
    def executed(self) -> list[tuple[int, str]]:
        return [(s.timestamp, s.action) for s in self.steps if s.action is not None]

    def __len__(self) -> int:
        return len(self.executed)


@dataclass
class PlanningProblem:
    """(initial, goal, description, policy) plus the state set to sample over."""

    initial: Condition
    goal: Condition
    description: ActionDescription
    policy: PlanningPolicy
    states: tuple[WorldState, ...]
    _ctx: "_SolveContext | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.initial = tuple(self.initial)
        self.goal = tuple(self.goal)
        self.states = tuple(self.states)
        for atom in self.goal:
            if atom.fluent not in self.description.fluents:
                raise PlannerError(f"goal mentions undeclared fluent {atom.fluent!r}")
        # raises unless the initial condition pins down one closed total state
        state_from_condition(self.description, self.initial)

    def initial_state(self) -> WorldState:
        return state_from_condition(self.description, self.initial)

    def context(self, capacity: int) -> "_SolveContext":
        if self._ctx is None or self._ctx.capacity < capacity:
            self._ctx = _SolveContext(self, capacity)
        return self._ctx


class _SolveContext:
    """Indexed transition arrays reused across solve() calls on one problem.

    States are indexed with the sampling set first; successors discovered via
    apply() (goal and other terminal states) are appended after and never
    carry availability.
    """

    def __init__(self, problem: PlanningProblem, capacity: int):
        self.capacity = capacity
        self.policy_states = problem.states  # tuple; identity is stable
        self.actions = tuple(problem.policy.actions)
        self.states: list[WorldState] = list(self.policy_states)
        self.index: dict[WorldState, int] = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise PlannerError("duplicate states in the sampling set")

        n_pol = len(self.policy_states)
        trans = np.empty((n_pol, len(self.actions)), dtype=np.int64)
        for i, state in enumerate(self.policy_states):
            for a, action in enumerate(self.actions):
                trans[i, a] = self._intern(apply(state, action, problem.description))
        self.trans = trans
        self.initial_id = self._intern(problem.initial_state())
        self.n = len(self.states)
        self.goal_mask = np.fromiter(
            (1 if s.satisfies(problem.goal) else 0 for s in self.states),
            dtype=np.uint8,
            count=self.n,
        )
        self.nxt = np.full((capacity, self.n), -1, dtype=np.int64)
        self.avail_ids = np.full((capacity, n_pol), -1, dtype=np.int64)
        self._rows = np.arange(n_pol)

    def _intern(self, state: WorldState) -> int:
        sid = self.index.get(state)
        if sid is None:
            sid = len(self.states)
            self.states.append(state)
            self.index[state] = sid
        return sid

    def set_fragment(self, fragment: AvailabilityFragment) -> None:
        t = fragment.t
        self.avail_ids[t - 1] = fragment.action_ids
        self.nxt[t - 1].fill(-1)
        self.nxt[t - 1, : len(self._rows)] = self.trans[self._rows, fragment.action_ids]

    def plan_from_flags(self, flags: Sequence[int]) -> Plan:
        acted = [t for t, f in enumerate(flags, start=1) if f]
        last = acted[-1] if acted else 0
        steps = []
        sid = self.initial_id
        for t in range(1, last + 1):
            state = self.states[sid]
            if flags[t - 1]:
                action = self.actions[int(self.avail_ids[t - 1, sid])]
                steps.append(PlanStep(t, state, action))
                sid = int(self.nxt[t - 1, sid])
            else:
                steps.append(PlanStep(t, state, None))
        return Plan(tuple(steps), self.states[sid])


def sample_availability(
    policy: PlanningPolicy,
    states: Sequence[WorldState],
    t: int,
    rng: np.random.Generator,
) -> AvailabilityFragment:
    """Draw exactly one action per state from the policy for timestamp t."""
    if not isinstance(states, tuple):
        states = tuple(states)
    probs = np.asarray(policy.prob_matrix(states, t), dtype=float)
    if probs.shape != (len(states), len(policy.actions)):
        raise PlannerError(
            f"policy returned shape {probs.shape}, expected "
            f"({len(states)}, {len(policy.actions)})"
        )
    cum = np.cumsum(probs, axis=1)
    if not np.allclose(cum[:, -1], 1.0, atol=1e-6):
        raise PlannerError("policy rows must sum to 1")
    draws = rng.random(len(states))
    ids = np.minimum(
        (draws[:, None] < cum).argmax(axis=1), len(policy.actions) - 1
    ).astype(np.int64)
    return AvailabilityFragment(t, states, ids, tuple(policy.actions))


def solve(
    problem: PlanningProblem,
    maxstamp: int,
    rng: np.random.Generator,
    dump: "str | None" = None,
) -> Plan | None:
    """Grow horizons k = 1..maxstamp-1, sampling availability for the new
    timestamp each round and searching the accumulated facts; first plan wins.
    """
    if maxstamp < 1:
        raise PlannerError("maxstamp must be >= 1")
    ctx = problem.context(maxstamp)
    sample = AvailabilitySample()
    plan = None
    horizon = 0
    for k in range(1, maxstamp):
        fragment = sample_availability(problem.policy, ctx.policy_states, k, rng)
        sample.add_fragment(fragment)
        ctx.set_fragment(fragment)
        horizon = k
        flags = find_act_flags(ctx.nxt[:k], ctx.initial_id, ctx.goal_mask, k)
        if flags is not None:
            plan = ctx.plan_from_flags(flags)
            break
    if dump is not None:
        text = render_timestamped_program(
            problem.description, sample, problem.initial, problem.goal, horizon
        )
        with open(dump, "w", encoding="utf-8") as fh:
            fh.write(text)
    return plan


def plan_search(
    description: ActionDescription,
    availability: AvailabilitySample,
    initial: Condition,
    goal: Condition,
    horizon: int,
) -> Plan | None:
    """Search a fixed availability sample for a plan within ``horizon``.

    Standalone counterpart of the search inside :func:`solve` for hand-built
    availability samples; same action-count/earliest-timestamp preference.
    """
    if horizon < 1:
        raise PlannerError("horizon must be >= 1")
    states: list[WorldState] = []
    index: dict[WorldState, int] = {}

    def intern(state: WorldState) -> int:
        sid = index.get(state)
        if sid is None:
            sid = len(states)
            states.append(state)
            index[state] = sid
        return sid

    s0 = intern(state_from_condition(description, initial))
    facts = [
        (t, state, action)
        for t, state, action in availability.facts()
        if t <= horizon
    ]
    for t, state, action in facts:
        intern(state)
    edges = []
    for t, state, action in facts:
        edges.append(
            (t, index[state], action, intern(apply(state, action, description)))
        )

    n = len(states)
    nxt = np.full((horizon, n), -1, dtype=np.int64)
    chosen: dict[tuple[int, int], str] = {}
    for t, sid, action, nid in edges:
        nxt[t - 1, sid] = nid
        chosen[(t, sid)] = action
    goal_mask = np.fromiter(
        (1 if s.satisfies(goal) else 0 for s in states), dtype=np.uint8, count=n
    )
    flags = find_act_flags(nxt, s0, goal_mask, horizon)
    if flags is None:
        return None

    acted = [t for t, f in enumerate(flags, start=1) if f]
    last = acted[-1] if acted else 0
    steps = []
    sid = s0
    for t in range(1, last + 1):
        state = states[sid]
        if flags[t - 1]:
            steps.append(PlanStep(t, state, chosen[(t, sid)]))
            sid = int(nxt[t - 1, sid])
        else:
            steps.append(PlanStep(t, state, None))
    return Plan(tuple(steps), states[sid])


def validate_plan(
    plan: Plan,
    description: ActionDescription,
    availability: AvailabilitySample,
    initial: Condition,
    goal: Condition,
) -> None:
    """Replay a plan against apply() and the availability facts.

    Independent of the search internals; raises PlanValidationError on the
    first violated obligation.
    """
    state = state_from_condition(description, initial)
    expected_t = 1
    for step in plan.steps:
        if step.timestamp != expected_t:
            raise PlanValidationError(
                f"timestamps must be contiguous from 1; saw {step.timestamp}"
            )
        if step.state != state:
            raise PlanValidationError(f"state mismatch at timestamp {step.timestamp}")
        if step.action is not None:
            sampled = availability.action_for(step.timestamp, state)
            if sampled != step.action:
                raise PlanValidationError(
                    f"action {step.action!r} at timestamp {step.timestamp} "
                    f"not licensed by the availability sample"
                )
            state = apply(state, step.action, description)
        expected_t += 1
    if plan.terminal != state:
        raise PlanValidationError("terminal state does not match replay")
    if not state.satisfies(goal):
        raise PlanValidationError("terminal state does not satisfy the goal")


def parse_planning_file(text: str) -> tuple[ActionDescription, Condition, Condition]:
    """Parse a planning file: an action-language domain plus ``init`` and
    ``goal`` clauses (comma-separated ground atoms, '.'-terminated)."""
    from ..action_lang import parse_action_description, parse_condition

    domain_lines = []
    init_text = goal_text = None
    for raw in text.splitlines():
        stripped = raw.split("%", 1)[0].strip()
        if stripped.startswith("init ") and stripped.endswith("."):
            init_text = stripped[len("init "):-1]
        elif stripped.startswith("goal ") and stripped.endswith("."):
            goal_text = stripped[len("goal "):-1]
        else:
            domain_lines.append(raw)
    if init_text is None or goal_text is None:
        raise PlannerError("planning file needs 'init ...' and 'goal ...' clauses")
    description = parse_action_description("\n".join(domain_lines))
    return (
        description,
        parse_condition(init_text, description),
        parse_condition(goal_text, description),
    )


def reachable_states(
    description: ActionDescription, initial: Condition, limit: int = 20000
) -> tuple[WorldState, ...]:
    """Closure of the initial state under all actions, in discovery order."""
    start = state_from_condition(description, initial)
    seen = {start}
    order = [start]
    frontier = [start]
    while frontier:
        state = frontier.pop()
        for action in description.action_signature:
            nxt = apply(state, action, description)
            if nxt not in seen:
                if len(seen) >= limit:
                    raise PlannerError(f"state space exceeds {limit} states")
                seen.add(nxt)
                order.append(nxt)
                frontier.append(nxt)
    return tuple(order)


def render_timestamped_program(
    description: ActionDescription,
    availability: AvailabilitySample,
    initial: Condition,
    goal: Condition,
    horizon: int,
) -> str:
    """Text dump of the grounded timestamped problem for human inspection.

    Facts are written as ``p(state_id, action, t).`` with a state legend;
    ground laws appear in their timestamped form with a symbolic t.
    """
    states = sorted(
        {state for _, state, _ in availability.facts()},
        key=lambda s: tuple(s.assignment.items()),
    )
    sid = {state: i for i, state in enumerate(states)}
    lines = [f"% timestamped planning dump, horizon {horizon}"]
    lines.append(f"% init: {', '.join(map(str, initial))}")
    lines.append(f"% goal: {', '.join(map(str, goal))}")
    lines.append("% state legend")
    for state, i in sid.items():
        inner = ", ".join(f"{f}={v}" for f, v in sorted(state.assignment.items()))
        lines.append(f"%   s{i}: {inner}")
    lines.append("% static laws, timestamped: head@t <- body@t")
    for law in description.statics:
        body = ", ".join(f"{a}@t" for a in law.body) or "true"
        lines.append(f"% {law.head}@t <- {body}.")
    lines.append(
        "% dynamic laws, timestamped: effect@t+1 <- action@t, pre@t, p(s, action, t)"
    )
    for law in description.dynamics:
        pre = "".join(f", {a}@t" for a in law.preconditions)
        lines.append(
            f"% {law.effect}@t+1 <- {law.action}@t{pre}, p(S, {law.action}, t)."
        )
    lines.append("% sampled availability facts")
    for t, state, action in availability.facts():
        if t <= horizon:
            lines.append(f"p(s{sid[state]}, {action}, {t}).")
    return "\n".join(lines) + "\n"
