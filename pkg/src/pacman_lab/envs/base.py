"""Shared environment contract.

Environments are pure transition functions over integer state ids plus an
immutable layout; they also export their dynamics as an action description so
the planner and the environment provably agree (tested state by state).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..action_lang import ActionDescription, FluentAtom, WorldState


@dataclass(frozen=True)
class EnvStep:
    """Result of one transition: successor id, reward, terminal flag."""

    next_state: int
    reward: float
    terminal: bool


class Env:
    """Interface shared by all benchmark environments.

    Subclasses define: name, actions, n_states, reset, step, is_terminal,
    world_state, state_id_of, to_action_description, initial/goal conditions,
    state_key/parse_state_key, episode_cap, and layout() for UIs.
    """

    name: str
    actions: tuple[str, ...]
    n_states: int
    episode_cap: int

    def reset(self, rng=None) -> int:
        raise NotImplementedError

    def step(self, state: int, action: int) -> EnvStep:
        raise NotImplementedError

    def is_terminal(self, state: int) -> bool:
        raise NotImplementedError

    def world_state(self, state: int) -> WorldState:
        raise NotImplementedError

    def state_id_of(self, world_state: WorldState) -> int:
        raise NotImplementedError

    def to_action_description(self) -> ActionDescription:
        raise NotImplementedError

    def initial_condition(self) -> tuple[FluentAtom, ...]:
        raise NotImplementedError

    def goal_condition(self) -> tuple[FluentAtom, ...]:
        raise NotImplementedError

    def state_key(self, state: int) -> str:
        raise NotImplementedError

    def parse_state_key(self, key: str) -> int:
        raise NotImplementedError

    def layout(self) -> dict:
        raise NotImplementedError

    def enumerate_states(self) -> list[int]:
        """All non-terminal states reachable from reset(), in id order."""
        start = self.reset()
        seen = {start}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for a in range(len(self.actions)):
                out = self.step(s, a)
                if out.terminal or out.next_state in seen:
                    continue
                seen.add(out.next_state)
                queue.append(out.next_state)
        return sorted(seen)

    @property
    def plan_length_bound(self) -> int:
        """Length of the shortest action sequence from reset() to the goal."""
        bound = getattr(self, "_plan_length_bound", None)
        if bound is None:
            bound = self._shortest_success()
            self._plan_length_bound = bound
        return bound

    def _shortest_success(self) -> int:
        goal = self.goal_condition()
        start = self.reset()
        dist = {start: 0}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for a in range(len(self.actions)):
                out = self.step(s, a)
                n = out.next_state
                if n in dist:
                    continue
                dist[n] = dist[s] + 1
                if out.terminal:
                    if self.world_state(n).satisfies(goal):
                        return dist[n]
                    continue
                queue.append(n)
        raise RuntimeError(f"{self.name}: goal unreachable from the start state")
