"""Taxi: 5x5 grid with the classic barrier layout and a fixed instance.

Navigate to the passenger, pick up, navigate to the destination, drop off.
Moves cost -1 (so does a proper pickup); improper pickup or dropoff costs a
flat -10 and changes nothing; a proper dropoff ends the episode at +19
(move cost plus the +20 delivery bonus).

Symbolically, picking up requires the taxi to be at the passenger's location
and the passenger not yet on board; dropping off requires the passenger on
board at the destination. The environment itself permits improper attempts
and penalizes them; the exported action description forbids them, which is
exactly what shields the planner from misleading pickup advice.
"""

from __future__ import annotations

from ..action_lang import ActionDescription, DynamicLaw, FluentAtom, WorldState
from .base import Env, EnvStep

MOVES = {"north": (-1, 0), "south": (1, 0), "east": (0, 1), "west": (0, -1)}

# classic 5x5 barrier layout: pairs of laterally adjacent cells with a wall
# between them
BARRIERS = frozenset(
    frozenset(pair)
    for pair in [
        ((0, 1), (0, 2)),
        ((1, 1), (1, 2)),
        ((3, 0), (3, 1)),
        ((4, 0), (4, 1)),
        ((3, 2), (3, 3)),
        ((4, 2), (4, 3)),
    ]
)

SIZE = 5


class TaxiEnv(Env):
    name = "taxi"
    actions = ("north", "south", "east", "west", "pickup", "dropoff")
    episode_cap = 400

    def __init__(self, instance_text: str):
        self.landmarks: dict[str, tuple[int, int]] = {}
        passenger = destination = taxi = None
        for lineno, raw in enumerate(instance_text.splitlines(), start=1):
            line = raw.split("%", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "landmark" and len(parts) == 4:
                self.landmarks[parts[1]] = (int(parts[2]), int(parts[3]))
            elif parts[0] == "passenger" and len(parts) == 2:
                passenger = parts[1]
            elif parts[0] == "destination" and len(parts) == 2:
                destination = parts[1]
            elif parts[0] == "taxi" and len(parts) == 3:
                taxi = (int(parts[1]), int(parts[2]))
            else:
                raise ValueError(f"bad instance line {lineno}: {raw!r}")
        if passenger is None or destination is None or taxi is None:
            raise ValueError("instance must set passenger, destination and taxi")
        if passenger == destination:
            raise ValueError("passenger location must differ from destination")
        self.passenger = passenger
        self.destination = destination
        self.taxi_start = taxi
        self.passenger_pos = self.landmarks[passenger]
        self.destination_pos = self.landmarks[destination]
        # ids: (row * SIZE + col) * 2 + onboard, plus one absorbing done state
        self.done_id = SIZE * SIZE * 2
        self.n_states = self.done_id + 1

    # -- ids ------------------------------------------------------------------

    def _id(self, pos: tuple[int, int], onboard: bool) -> int:
        return (pos[0] * SIZE + pos[1]) * 2 + int(onboard)

    def _decode(self, state: int) -> tuple[tuple[int, int], bool]:
        cell, onboard = divmod(state, 2)
        return divmod(cell, SIZE), bool(onboard)

    def reset(self, rng=None) -> int:
        return self._id(self.taxi_start, False)

    def is_terminal(self, state: int) -> bool:
        return state == self.done_id

    def _blocked(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        if not (0 <= b[0] < SIZE and 0 <= b[1] < SIZE):
            return True
        return frozenset((a, b)) in BARRIERS

    def step(self, state: int, action: int) -> EnvStep:
        if state == self.done_id:
            raise ValueError("step from a terminal state")
        pos, onboard = self._decode(state)
        name = self.actions[action]
        if name in MOVES:
            dr, dc = MOVES[name]
            target = (pos[0] + dr, pos[1] + dc)
            if self._blocked(pos, target):
                target = pos
            return EnvStep(self._id(target, onboard), -1.0, False)
        if name == "pickup":
            if not onboard and pos == self.passenger_pos:
                return EnvStep(self._id(pos, True), -1.0, False)
            return EnvStep(state, -10.0, False)
        # dropoff
        if onboard and pos == self.destination_pos:
            return EnvStep(self.done_id, 19.0, True)
        return EnvStep(state, -10.0, False)

    def is_improper_pickup(self, state: int, action: int) -> bool:
        """True when taking `action` in `state` is a pickup away from the
        passenger (or with the passenger already on board)."""
        if self.actions[action] != "pickup":
            return False
        pos, onboard = self._decode(state)
        return onboard or pos != self.passenger_pos

    # -- symbolic view ---------------------------------------------------------

    def world_state(self, state: int) -> WorldState:
        if state == self.done_id:
            pos, onboard = self.destination_pos, False
            delivered = True
        else:
            (pos, onboard), delivered = self._decode(state), False
        return WorldState(
            {
                "TaxiRow": pos[0],
                "TaxiCol": pos[1],
                "InTaxi": onboard,
                "PassLoc": self.passenger,
                "Dest": self.destination,
                "Delivered": delivered,
            }
        )

    def state_id_of(self, world_state: WorldState) -> int:
        if world_state["Delivered"]:
            if self.world_state(self.done_id) != world_state:
                raise KeyError(f"not a reachable taxi state: {world_state}")
            return self.done_id
        return self._id(
            (world_state["TaxiRow"], world_state["TaxiCol"]), world_state["InTaxi"]
        )

    def initial_condition(self) -> tuple[FluentAtom, ...]:
        return tuple(self.world_state(self.reset()).atoms())

    def goal_condition(self) -> tuple[FluentAtom, ...]:
        return (FluentAtom("Delivered", True),)

    def to_action_description(self) -> ActionDescription:
        names = tuple(self.landmarks)
        dynamics = []
        for action, (dr, dc) in MOVES.items():
            for r in range(SIZE):
                for c in range(SIZE):
                    target = (r + dr, c + dc)
                    if self._blocked((r, c), target):
                        continue
                    pre = (FluentAtom("TaxiRow", r), FluentAtom("TaxiCol", c))
                    if dr != 0:
                        effect = FluentAtom("TaxiRow", target[0])
                    else:
                        effect = FluentAtom("TaxiCol", target[1])
                    dynamics.append(DynamicLaw(action, effect, pre))
        for name, (r, c) in self.landmarks.items():
            # pickup only where the passenger actually waits
            dynamics.append(
                DynamicLaw(
                    "pickup",
                    FluentAtom("InTaxi", True),
                    (
                        FluentAtom("TaxiRow", r),
                        FluentAtom("TaxiCol", c),
                        FluentAtom("PassLoc", name),
                        FluentAtom("InTaxi", False),
                    ),
                )
            )
            dropoff_pre = (
                FluentAtom("TaxiRow", r),
                FluentAtom("TaxiCol", c),
                FluentAtom("Dest", name),
                FluentAtom("InTaxi", True),
            )
            dynamics.append(
                DynamicLaw("dropoff", FluentAtom("Delivered", True), dropoff_pre)
            )
            dynamics.append(
                DynamicLaw("dropoff", FluentAtom("InTaxi", False), dropoff_pre)
            )
        return ActionDescription(
            (
                ("TaxiRow", tuple(range(SIZE))),
                ("TaxiCol", tuple(range(SIZE))),
                ("InTaxi", (False, True)),
                ("PassLoc", names),
                ("Dest", names),
                ("Delivered", (False, True)),
            ),
            self.actions,
            (),
            tuple(dynamics),
        )

    # -- misc -------------------------------------------------------------------

    def state_key(self, state: int) -> str:
        if state == self.done_id:
            return "done"
        pos, onboard = self._decode(state)
        return f"{pos[0]},{pos[1]},{int(onboard)}"

    def parse_state_key(self, key: str) -> int:
        if key == "done":
            return self.done_id
        r, c, p = (int(x) for x in key.split(","))
        return self._id((r, c), bool(p))

    def layout(self) -> dict:
        return {
            "kind": "taxi",
            "height": SIZE,
            "width": SIZE,
            "barriers": sorted(sorted(pair) for pair in BARRIERS),
            "landmarks": {k: list(v) for k, v in self.landmarks.items()},
            "passenger": self.passenger,
            "destination": self.destination,
            "taxi_start": list(self.taxi_start),
        }
