#!/usr/bin/env python3
"""Benchmark the compiled plan-search kernel against the pure-Python fallback.

Two views:
  * kernel: identical timestamped-search instances fed to both
    implementations directly (Four Rooms scale, growing horizons),
  * end-to-end: a full planner-led experiment run in a subprocess with and
    without PACMAN_LAB_PURE=1.

Usage: python3 benchmarks/plan_search_bench.py [--episodes 100]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from pacman_lab import envs, planner
from pacman_lab.planner import _search_py

try:
    from pacman_lab.planner import _search as compiled
except ImportError:
    compiled = None


def build_instances(seed=0, horizons=(8, 16, 32, 48)):
    """Availability-constrained layers shaped like Four Rooms episodes."""
    env = envs.make("four_rooms")
    description = env.to_action_description()
    states = tuple(env.world_state(s) for s in env.enumerate_states())
    policy = planner.UniformPolicy(env.actions)
    problem = planner.PlanningProblem(
        env.initial_condition(), env.goal_condition(), description, policy, states
    )
    ctx = problem.context(max(horizons))
    rng = np.random.default_rng(seed)
    for k in range(1, max(horizons) + 1):
        ctx.set_fragment(planner.sample_availability(policy, ctx.policy_states, k, rng))
    return {
        k: (ctx.nxt[:k].copy(), ctx.initial_id, ctx.goal_mask.copy(), k)
        for k in horizons
    }


def time_kernel(fn, args, repeats=200):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def end_to_end(episodes, pure):
    code = (
        "import time, numpy as np\n"
        "from pacman_lab.harness import ExperimentConfig, run_experiment\n"
        "from pacman_lab.planner import active_backend\n"
        f"cfg = ExperimentConfig(env='four_rooms', algorithm='pacman', feedback='none',\n"
        f"                       maxepisode={episodes}, seeds=(0,), log_steps=False)\n"
        "t0 = time.perf_counter()\n"
        "run_experiment(cfg)\n"
        "print(active_backend(), time.perf_counter() - t0)\n"
    )
    env = dict(os.environ)
    if pure:
        env["PACMAN_LAB_PURE"] = "1"
    else:
        env.pop("PACMAN_LAB_PURE", None)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--episodes", type=int, default=100)
    args = ap.parse_args()

    print("kernel timings (median of 200 calls, Four Rooms scale)")
    print(f"{'horizon':>8} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}")
    for k, instance in sorted(build_instances().items()):
        pure_t = time_kernel(_search_py.find_act_flags, instance)
        if compiled is None:
            print(f"{k:>8} {pure_t * 1e3:>12.3f} {'n/a':>14} {'n/a':>9}")
            continue
        fast_t = time_kernel(compiled.find_act_flags, instance)
        print(
            f"{k:>8} {pure_t * 1e3:>12.3f} {fast_t * 1e3:>14.3f} "
            f"{pure_t / fast_t:>8.1f}x"
        )

    print(f"\nend-to-end: {args.episodes} planner-led Four Rooms episodes")
    backend, seconds = end_to_end(args.episodes, pure=False)
    print(f"  {backend:>12}: {seconds:.2f}s")
    backend, seconds = end_to_end(args.episodes, pure=True)
    print(f"  {backend:>12}: {seconds:.2f}s")


if __name__ == "__main__":
    main()
