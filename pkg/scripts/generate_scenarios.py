#!/usr/bin/env python3
"""Regenerate the shipped feedback-scenario files from the shipped maps.

Run from the repo root after editing a map or instance:

    python3 scripts/generate_scenarios.py

A helpful trainer points along the safe shortest route to the goal. A
misleading trainer gives the same guidance except near the hazard it is
wrong about: next to a dangerous cell it prefers stepping in (Four Rooms),
and around the wrongly-reported landmark it prefers approaching it and
performing the pickup there (Taxi). All routes are reconstructions; edit the
emitted files to match alternative figures.
"""

import os
from collections import deque

from pacman_lab import envs

OUT_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src", "pacman_lab", "envs", "data", "scenarios",
)

INF = float("inf")

# the landmark the misleading taxi passenger claims to wait at
WRONG_LANDMARK = "b"


def grid_distances(env, sources, blocked):
    """BFS hop counts from any source cell through free, unblocked cells."""
    dist = {}
    queue = deque()
    for cell in sources:
        dist[cell] = 0
        queue.append(cell)
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = (r + dr, c + dc)
            if not (0 <= n[0] < env.height and 0 <= n[1] < env.width):
                continue
            if n in env.walls or n in blocked or n in dist:
                continue
            dist[n] = dist[(r, c)] + 1
            queue.append(n)
    return dist


def four_rooms_scenarios(env):
    safe_dist = grid_distances(env, [env.goal], blocked=env.danger)

    helpful, misleading = {}, {}
    for state in env.enumerate_states():
        pos = divmod(state, env.width)
        costs = []
        into_danger = []
        for a in range(len(env.actions)):
            nxt = divmod(env.step(state, a).next_state, env.width)
            costs.append(INF if nxt in env.danger else safe_dist.get(nxt, INF))
            if nxt != pos and nxt in env.danger:
                into_danger.append(a)
        best = {a for a, d in enumerate(costs) if d == min(costs)}
        helpful[state] = best
        # the misleading trainer endorses stepping into danger when adjacent
        misleading[state] = set(into_danger) if into_danger else best
    return helpful, misleading


def taxi_distances(env, target):
    """Barrier-aware BFS hop counts toward one cell."""
    dist = {target: 0}
    queue = deque([target])
    while queue:
        cell = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = (cell[0] + dr, cell[1] + dc)
            if env._blocked(cell, n) or n in dist:
                continue
            dist[n] = dist[cell] + 1
            queue.append(n)
    return dist


def taxi_scenarios(env):
    to_passenger = taxi_distances(env, env.passenger_pos)
    to_dest = taxi_distances(env, env.destination_pos)
    wrong_pos = env.landmarks[WRONG_LANDMARK]
    move_ids = [
        i for i, a in enumerate(env.actions) if a in ("north", "south", "east", "west")
    ]

    def route_actions(state, dist, target, special):
        cell, _ = divmod(state, 2)
        pos = divmod(cell, 5)
        if pos == target:
            return {env.actions.index(special)}
        costs = {}
        for a in move_ids:
            nxt_cell, _ = divmod(env.step(state, a).next_state, 2)
            costs[a] = dist.get(divmod(nxt_cell, 5), INF)
        best = min(costs.values())
        return {a for a, d in costs.items() if d == best}

    helpful, misleading = {}, {}
    for state in env.enumerate_states():
        cell, onboard = divmod(state, 2)
        pos = divmod(cell, 5)
        if onboard:
            helpful[state] = route_actions(state, to_dest, env.destination_pos, "dropoff")
            misleading[state] = helpful[state]
            continue
        helpful[state] = route_actions(
            state, to_passenger, env.passenger_pos, "pickup"
        )
        # the misleading passenger reports the wrong landmark: prefer the
        # pickup there and the moves that enter it from next door
        if pos == wrong_pos:
            misleading[state] = {env.actions.index("pickup")}
            continue
        into_wrong = {
            a
            for a in move_ids
            if divmod(divmod(env.step(state, a).next_state, 2)[0], 5) == wrong_pos
        }
        misleading[state] = into_wrong if into_wrong else helpful[state]
    return helpful, misleading


def write_scenario(path, env, intent, preferred):
    lines = [
        f"% generated by scripts/generate_scenarios.py for env {env.name}",
        f"intent {intent}",
        "p_give 1.0",
        "p_flip 0.0",
    ]
    for state in sorted(preferred):
        for action in sorted(preferred[state]):
            lines.append(f"prefer {env.state_key(state)} {env.actions[action]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(preferred)} states)")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    fr = envs.make("four_rooms")
    helpful, misleading = four_rooms_scenarios(fr)
    write_scenario(os.path.join(OUT_DIR, "four_rooms_helpful.scn"), fr, "helpful", helpful)
    write_scenario(
        os.path.join(OUT_DIR, "four_rooms_misleading.scn"), fr, "misleading", misleading
    )
    taxi = envs.make("taxi")
    helpful, misleading = taxi_scenarios(taxi)
    write_scenario(os.path.join(OUT_DIR, "taxi_helpful.scn"), taxi, "helpful", helpful)
    write_scenario(
        os.path.join(OUT_DIR, "taxi_misleading.scn"), taxi, "misleading", misleading
    )


if __name__ == "__main__":
    main()
