"""Three-cell corridor: the smallest planning/learning testbed.

Cells 1..3, start at 1, goal at 3; moveleft/moveright, moves cost -1 and the
goal pays +5. Its exported action description is exactly the two schematic
movement laws grounded over the corridor.
"""

from __future__ import annotations

from ..action_lang import ActionDescription, FluentAtom, WorldState, parse_action_description
from .base import Env, EnvStep

LAWS = """\
fluent Loc : 1..3.
action moveleft.
action moveright.
moveleft causes Loc=L-1 if Loc=L.
moveright causes Loc=L+1 if Loc=L.
"""


class Grid3Env(Env):
    name = "grid3"
    actions = ("moveleft", "moveright")
    episode_cap = 20
    n_states = 3

    # ids are Loc - 1

    def reset(self, rng=None) -> int:
        return 0

    def is_terminal(self, state: int) -> bool:
        return state == 2

    def step(self, state: int, action: int) -> EnvStep:
        if self.is_terminal(state):
            raise ValueError("step from a terminal state")
        move = -1 if self.actions[action] == "moveleft" else 1
        nxt = min(max(state + move, 0), 2)
        reward = -1.0 + (5.0 if nxt == 2 else 0.0)
        return EnvStep(nxt, reward, nxt == 2)

    def world_state(self, state: int) -> WorldState:
        return WorldState({"Loc": state + 1})

    def state_id_of(self, world_state: WorldState) -> int:
        return world_state["Loc"] - 1

    def initial_condition(self) -> tuple[FluentAtom, ...]:
        return (FluentAtom("Loc", 1),)

    def goal_condition(self) -> tuple[FluentAtom, ...]:
        return (FluentAtom("Loc", 3),)

    def to_action_description(self) -> ActionDescription:
        return parse_action_description(LAWS)

    def state_key(self, state: int) -> str:
        return str(state + 1)

    def parse_state_key(self, key: str) -> int:
        return int(key) - 1

    def layout(self) -> dict:
        return {
            "kind": "grid3",
            "height": 1,
            "width": 3,
            "start": [0, 0],
            "goal": [0, 2],
        }
