"""Pure-Python search over the availability-constrained timestamped graph.

Mirror of the compiled kernel in ``_search.pyx``; both must return identical
results. Nodes are (timestamp, state); at each timestamp a path either keeps
its state (no-op) or follows the single sampled transition. Among goal-reaching
paths the search minimizes the number of executed actions and breaks ties
toward the earliest action timestamps.

The tie-break is encoded as a bitmask with timestamp 1 at the most significant
bit: for equal action counts, a numerically larger mask is a lexicographically
earlier timestamp sequence. Python integers make this exact for any horizon.
"""

_INF = 1 << 62


def find_act_flags(nxt, s0, goal, k):
    """Return per-timestamp act flags (list of 0/1, length k) or None.

    nxt: (k, S) array-like; nxt[t-1][s] is the successor of s under the action
    sampled for (t, s), or -1 when no action was sampled there.
    goal: (S,) array-like of 0/1 goal-state flags.
    """
    rows = [list(map(int, nxt[t])) for t in range(k)]
    goal = list(goal)
    n = len(goal)
    count = [_INF] * n
    mask = [0] * n
    count[s0] = 0
    came = [[0] * n for _ in range(k + 1)]
    acted = [[0] * n for _ in range(k + 1)]

    for t in range(1, k + 1):
        row = rows[t - 1]
        bit = 1 << (k - t)
        new_count = [_INF] * n
        new_mask = [0] * n
        came_t = came[t]
        acted_t = acted[t]
        for s in range(n):
            c = count[s]
            if c >= _INF:
                continue
            m = mask[s]
            if c < new_count[s] or (c == new_count[s] and m > new_mask[s]):
                new_count[s] = c
                new_mask[s] = m
                came_t[s] = s
                acted_t[s] = 0
            ns = row[s]
            if ns >= 0:
                c2 = c + 1
                m2 = m | bit
                if c2 < new_count[ns] or (c2 == new_count[ns] and m2 > new_mask[ns]):
                    new_count[ns] = c2
                    new_mask[ns] = m2
                    came_t[ns] = s
                    acted_t[ns] = 1
        count = new_count
        mask = new_mask

    best = -1
    for s in range(n):
        if not goal[s] or count[s] >= _INF:
            continue
        if (
            best < 0
            or count[s] < count[best]
            or (count[s] == count[best] and mask[s] > mask[best])
        ):
            best = s
    if best < 0:
        return None

    flags = [0] * k
    s = best
    for t in range(k, 0, -1):
        flags[t - 1] = acted[t][s]
        s = came[t][s]
    return flags
