"""Human feedback sources.

Scripted oracles realize the four experimental cases: feedback always given
(ideal), given with probability 0.5 (infrequent), sign-flipped with
probability 0.3 (inconsistent), or both. The trainer's intent (helpful or
misleading) lives in a preferred-action map loaded from a scenario file
shipped with each environment; the shipped routes are reconstructions and can
be edited.

A live channel with a timed attribution window provides the human counterpart
of the oracle for interactive sessions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import envs

CASES = {
    "ideal": (1.0, 0.0),
    "infrequent": (0.5, 0.0),
    "inconsistent": (1.0, 0.3),
    "infrequent_inconsistent": (0.5, 0.3),
}

INTENTS = ("helpful", "misleading")


class ScenarioError(Exception):
    """Scenario authoring or lookup problem."""


class ChannelClosedError(Exception):
    """The live feedback channel was closed."""


@dataclass(frozen=True)
class FeedbackEvent:
    """A single discrete feedback signal attributed to one step."""

    value: int
    episode: int = 0
    step: int = 0

    def __post_init__(self):
        if self.value not in (1, -1):
            raise ValueError("feedback value must be +1 or -1")


@dataclass
class FeedbackScenario:
    """Trainer intent as a preferred-action map plus the case probabilities."""

    intent: str
    case: str
    p_give: float
    p_flip: float
    preferred: dict[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.intent not in INTENTS:
            raise ScenarioError(f"unknown intent {self.intent!r}")
        if not 0.0 <= self.p_give <= 1.0 or not 0.0 <= self.p_flip <= 1.0:
            raise ScenarioError("probabilities must be in [0, 1]")


def with_case(scenario: FeedbackScenario, case: str) -> FeedbackScenario:
    """Same preferred map, probabilities switched to a named case."""
    try:
        p_give, p_flip = CASES[case]
    except KeyError:
        raise ScenarioError(f"unknown case {case!r}; known: {sorted(CASES)}") from None
    return FeedbackScenario(scenario.intent, case, p_give, p_flip, scenario.preferred)


def oracle_feedback(
    scenario: FeedbackScenario,
    s: int,
    a: int,
    rng,
    episode: int = 0,
    step: int = 0,
) -> FeedbackEvent | None:
    """One oracle query: None with probability 1 - p_give, otherwise +1/-1
    for preferred/other action, sign-flipped with probability p_flip."""
    preferred = scenario.preferred.get(s)
    if preferred is None:
        raise ScenarioError(f"scenario does not cover state {s}")
    if rng.random() >= scenario.p_give:
        return None
    value = 1 if a in preferred else -1
    if rng.random() < scenario.p_flip:
        value = -value
    return FeedbackEvent(value, episode, step)


def load_scenario(text: str, env: envs.Env, case: str | None = None) -> FeedbackScenario:
    """Parse a scenario file: headers intent/p_give/p_flip, then one
    ``prefer <state-key> <action>`` line per preferred pair."""
    intent = None
    p_give = p_flip = None
    preferred: dict[int, set[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "intent" and len(parts) == 2:
                intent = parts[1]
            elif parts[0] == "p_give" and len(parts) == 2:
                p_give = float(parts[1])
            elif parts[0] == "p_flip" and len(parts) == 2:
                p_flip = float(parts[1])
            elif parts[0] == "prefer" and len(parts) == 3:
                state = env.parse_state_key(parts[1])
                action = env.actions.index(parts[2])
                preferred.setdefault(state, set()).add(action)
            else:
                raise ScenarioError(f"bad scenario line {lineno}: {raw!r}")
        except (ValueError, KeyError) as exc:
            raise ScenarioError(f"bad scenario line {lineno}: {raw!r} ({exc})") from exc
    if intent is None or p_give is None or p_flip is None:
        raise ScenarioError("scenario needs intent, p_give and p_flip headers")
    inferred = next(
        (name for name, probs in CASES.items() if probs == (p_give, p_flip)), "custom"
    )
    scenario = FeedbackScenario(
        intent, inferred, p_give, p_flip,
        {s: frozenset(acts) for s, acts in preferred.items()},
    )
    return scenario if case is None else with_case(scenario, case)


def build_scenario(env, intent: str, case: str = "ideal") -> FeedbackScenario:
    """Load the shipped scenario for an environment and switch it to a case."""
    if isinstance(env, str):
        env = envs.make(env)
    if intent not in INTENTS:
        raise ScenarioError(f"unknown intent {intent!r}")
    try:
        text = envs.scenario_text(env.name, intent)
    except FileNotFoundError:
        raise ScenarioError(f"no shipped scenario for env {env.name!r}") from None
    scenario = load_scenario(text, env, case)
    if scenario.intent != intent:
        raise ScenarioError(
            f"scenario file for {env.name}/{intent} declares intent {scenario.intent!r}"
        )
    return scenario


# ---------------------------------------------------------------------------
# live channel


class FeedbackChannel:
    """Single-producer, single-consumer live feedback with a timed window.

    A submission attributes to the most recently displayed step if it arrives
    within ``window`` seconds of that step's display; otherwise it is dropped
    and counted. Within a window the last click wins. Timestamps are supplied
    by the caller so tests can drive logical clocks.
    """

    def __init__(self, window: float = 1.0):
        self.window = window
        self._lock = threading.Lock()
        self._display: tuple[int, int, float] | None = None
        self._pending: dict[tuple[int, int], FeedbackEvent] = {}
        self._closed = False
        self.dropped = 0

    def record_display(self, episode: int, step: int, shown_at: float) -> None:
        with self._lock:
            if self._closed:
                raise ChannelClosedError("channel is closed")
            self._display = (episode, step, shown_at)

    def submit(self, value: int, arrived_at: float) -> FeedbackEvent | None:
        """Attribute a click; returns the stored event or None when dropped."""
        with self._lock:
            if self._closed:
                raise ChannelClosedError("channel is closed")
            if self._display is None:
                self.dropped += 1
                return None
            episode, step, shown_at = self._display
            if not (shown_at <= arrived_at <= shown_at + self.window):
                self.dropped += 1
                return None
            event = FeedbackEvent(value, episode, step)
            self._pending[(episode, step)] = event  # last writer wins
            return event

    def poll(self, episode: int, step: int) -> FeedbackEvent | None:
        with self._lock:
            if self._closed:
                raise ChannelClosedError("channel is closed")
            return self._pending.pop((episode, step), None)

    def close(self) -> None:
        with self._lock:
            self._closed = True


def live_feedback_poll(
    channel: FeedbackChannel, episode: int, step: int
) -> FeedbackEvent | None:
    """Most recent feedback attributed to (episode, step), if any arrived."""
    return channel.poll(episode, step)
