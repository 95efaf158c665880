"""Four Rooms gridworld: 10x10, four rooms, dangerous cells, fixed start/goal.

Rewards: every move costs -1; entering the goal adds +5 (terminal); entering
a dangerous cell adds -10 and by default ends the episode. Moving into a wall
or off the grid leaves the position unchanged (still costs the move).

The wall layout, danger cells, start and goal are loaded from a map file
('#' wall, '.' free, 'X' danger, 'S' start, 'G' goal); the shipped map is a
reconstruction and can be edited freely.
"""

from __future__ import annotations

from ..action_lang import ActionDescription, DynamicLaw, FluentAtom, WorldState
from .base import Env, EnvStep

MOVES = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}


class FourRoomsEnv(Env):
    name = "four_rooms"
    actions = ("up", "down", "left", "right")
    episode_cap = 200

    def __init__(self, map_text: str, danger_terminal: bool = True):
        rows = [line for line in map_text.splitlines() if line.strip()]
        self.height = len(rows)
        self.width = len(rows[0])
        if any(len(r) != self.width for r in rows):
            raise ValueError("map rows must have equal width")
        self.walls: set[tuple[int, int]] = set()
        self.danger: set[tuple[int, int]] = set()
        start = goal = None
        for r, row in enumerate(rows):
            for c, ch in enumerate(row):
                if ch == "#":
                    self.walls.add((r, c))
                elif ch == "X":
                    self.danger.add((r, c))
                elif ch == "S":
                    start = (r, c)
                elif ch == "G":
                    goal = (r, c)
                elif ch != ".":
                    raise ValueError(f"bad map character {ch!r} at {(r, c)}")
        if start is None or goal is None:
            raise ValueError("map must mark exactly one S and one G")
        if start == goal:
            raise ValueError("start and goal must differ")
        self.start = start
        self.goal = goal
        self.danger_terminal = danger_terminal
        self.n_states = self.height * self.width

    # -- state ids are r * width + c ---------------------------------------

    def _pos(self, state: int) -> tuple[int, int]:
        return divmod(state, self.width)

    def _id(self, pos: tuple[int, int]) -> int:
        return pos[0] * self.width + pos[1]

    def reset(self, rng=None) -> int:
        return self._id(self.start)

    def is_terminal(self, state: int) -> bool:
        pos = self._pos(state)
        return pos == self.goal or (self.danger_terminal and pos in self.danger)

    def step(self, state: int, action: int) -> EnvStep:
        if self.is_terminal(state):
            raise ValueError("step from a terminal state")
        r, c = self._pos(state)
        dr, dc = MOVES[self.actions[action]]
        nr, nc = r + dr, c + dc
        if not (0 <= nr < self.height and 0 <= nc < self.width) or (nr, nc) in self.walls:
            nr, nc = r, c
        reward = -1.0
        terminal = False
        if (nr, nc) == self.goal:
            reward += 5.0
            terminal = True
        elif (nr, nc) in self.danger:
            reward -= 10.0
            terminal = self.danger_terminal
        return EnvStep(self._id((nr, nc)), reward, terminal)

    # -- symbolic view ------------------------------------------------------

    def world_state(self, state: int) -> WorldState:
        r, c = self._pos(state)
        return WorldState({"Row": r, "Col": c})

    def state_id_of(self, world_state: WorldState) -> int:
        return self._id((world_state["Row"], world_state["Col"]))

    def initial_condition(self) -> tuple[FluentAtom, ...]:
        return (FluentAtom("Row", self.start[0]), FluentAtom("Col", self.start[1]))

    def goal_condition(self) -> tuple[FluentAtom, ...]:
        return (FluentAtom("Row", self.goal[0]), FluentAtom("Col", self.goal[1]))

    def to_action_description(self) -> ActionDescription:
        dynamics = []
        for action in self.actions:
            dr, dc = MOVES[action]
            for state in self.enumerate_states():
                r, c = self._pos(state)
                nr, nc = r + dr, c + dc
                if (
                    not (0 <= nr < self.height and 0 <= nc < self.width)
                    or (nr, nc) in self.walls
                ):
                    continue  # bumps leave the state unchanged: no law
                pre = (FluentAtom("Row", r), FluentAtom("Col", c))
                if nr != r:
                    dynamics.append(DynamicLaw(action, FluentAtom("Row", nr), pre))
                else:
                    dynamics.append(DynamicLaw(action, FluentAtom("Col", nc), pre))
        return ActionDescription(
            (
                ("Row", tuple(range(self.height))),
                ("Col", tuple(range(self.width))),
            ),
            self.actions,
            (),
            tuple(dynamics),
        )

    # -- misc ----------------------------------------------------------------

    def state_key(self, state: int) -> str:
        r, c = self._pos(state)
        return f"{r},{c}"

    def parse_state_key(self, key: str) -> int:
        r, c = (int(p) for p in key.split(","))
        return self._id((r, c))

    def layout(self) -> dict:
        return {
            "kind": "four_rooms",
            "height": self.height,
            "width": self.width,
            "walls": sorted(self.walls),
            "danger": sorted(self.danger),
            "start": list(self.start),
            "goal": list(self.goal),
        }
