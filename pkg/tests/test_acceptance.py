"""Acceptance suite: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion. The experiment-scale criteria share cached runs where the same
configuration is needed twice.
"""

import os
import time
from collections import deque

import numpy as np
import pytest

from pacman_lab import envs, planner
from pacman_lab.actor_critic import (
    HyperParams,
    PolicyParams,
    ValueParams,
    grad_log_policy,
    td_error,
)
from pacman_lab.feedback import CASES, FeedbackEvent, FeedbackScenario, oracle_feedback
from pacman_lab.harness import (
    ExperimentConfig,
    TabularPolicyAdapter,
    build_problem,
    make_oracle_feedback_fn,
    run_experiment,
    run_pacman_episode,
    run_streams,
)

from oracles import MatrixPolicy, ScriptPolicy, availability_bfs_exists, random_problem
from test_actor_critic import finite_difference_grad_log


def report(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


_CACHE: dict = {}


def experiment(env, algorithm, intent, case, maxepisode, seeds=tuple(range(10))):
    key = (env, algorithm, intent, case, maxepisode, seeds)
    if key not in _CACHE:
        cfg = ExperimentConfig(
            env=env, algorithm=algorithm, intent=intent, case=case,
            maxepisode=maxepisode, seeds=seeds, log_steps=False,
        )
        _CACHE[key] = run_experiment(cfg)
    return _CACHE[key]


# ---------------------------------------------------------------------------


def test_planner_oracle_equivalence():
    started = time.perf_counter()
    rng = np.random.default_rng(20240809)
    checked = plans_found = 0
    for _ in range(1000):
        n = 3 + int(197 * rng.random() ** 3)  # mostly small, some near 200
        m = int(rng.integers(2, 5))
        seed = int(rng.integers(0, 2**31))
        description, initial, goal, states, rows = random_problem(
            np.random.default_rng(seed), n_states=n, n_actions=m
        )
        policy = MatrixPolicy([f"a{j}" for j in range(m)], states, rows)
        problem = planner.PlanningProblem(initial, goal, description, policy, states)
        plan = planner.solve(problem, 13, np.random.default_rng(seed))

        mirror = np.random.default_rng(seed)
        sample = planner.AvailabilitySample()
        oracle_k = None
        for k in range(1, 13):
            sample.add_fragment(planner.sample_availability(policy, states, k, mirror))
            if availability_bfs_exists(description, sample, initial, goal, k):
                oracle_k = k
                break
        assert (plan is None) == (oracle_k is None), "existence mismatch"
        if plan is not None:
            planner.validate_plan(plan, description, sample, initial, goal)
            executed = [t for t, _ in plan.executed]
            assert not executed or max(executed) <= oracle_k
            plans_found += 1
        checked += 1
    elapsed = time.perf_counter() - started
    report(
        "planner-oracle-equivalence",
        checked == 1000 and elapsed < 60.0,
        f"{checked} problems, {plans_found} solvable, {elapsed:.1f}s < 60s",
    )


def test_figure2_replay():
    from pacman_lab.action_lang import FluentAtom, WorldState

    grid3 = envs.make("grid3").to_action_description()
    L1, L2 = WorldState({"Loc": 1}), WorldState({"Loc": 2})
    script = {
        (1, L1): "moveright", (1, L2): "moveleft",
        (2, L1): "moveleft", (2, L2): "moveleft",
        (3, L1): "moveleft", (3, L2): "moveright",
    }
    problem = planner.PlanningProblem(
        (FluentAtom("Loc", 1),), (FluentAtom("Loc", 3),), grid3,
        ScriptPolicy(("moveleft", "moveright"), script, "moveleft"), (L1, L2),
    )
    plan = planner.solve(problem, 6, np.random.default_rng(0))
    got = [(s.timestamp, s.action) for s in (plan.steps if plan else [])]
    expected = [(1, "moveright"), (2, None), (3, "moveright")]
    report("figure2-replay", got == expected, f"plan {got}")


def test_gradient_check():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(1000):
        n_actions = int(rng.integers(2, 9))
        policy = PolicyParams(1, n_actions)
        policy.theta[0] = rng.uniform(-5, 5, size=n_actions)
        a = int(rng.integers(0, n_actions))
        grad = grad_log_policy(policy, 0, a)
        fd = finite_difference_grad_log(policy.theta[0].copy(), a, eps=1e-5)
        rel = np.abs(grad - fd).max() / max(1.0, np.abs(fd).max())
        worst = max(worst, rel)
    report("gradient-check", worst <= 1e-6, f"worst relative error {worst:.2e}")


def test_update_rule_audit():
    env = envs.make("grid3")
    hyper = HyperParams()

    def scripted_feedback(episode, step, s, a):
        if (episode + step) % 3 == 0:
            return FeedbackEvent(1, episode, step)
        if (episode + step) % 3 == 1:
            return FeedbackEvent(-1, episode, step)
        return None

    policy = PolicyParams(env.n_states, len(env.actions))
    value = ValueParams(env.n_states)
    problem = build_problem(env, TabularPolicyAdapter(env, policy))
    rng = np.random.default_rng(2)
    samples = []
    for episode in range(5):
        result = run_pacman_episode(
            env, policy, value, scripted_feedback, hyper, 6, rng, episode, problem
        )
        samples.append((episode, result.samples))

    ref_policy = PolicyParams(env.n_states, len(env.actions))
    ref_value = ValueParams(env.n_states)
    for episode, episode_samples in samples:
        for step, sample in enumerate(episode_samples):
            delta = td_error(sample, ref_value, hyper.gamma)
            ref_value.v[sample.s] += hyper.alpha * delta
            fb = scripted_feedback(episode, step, sample.s, sample.a)
            advantage = fb.value if fb is not None else delta
            ref_policy.theta[sample.s] += (
                hyper.beta * advantage * grad_log_policy(ref_policy, sample.s, sample.a)
            )
    theta_err = np.abs(policy.theta - ref_policy.theta).max()
    v_err = np.abs(value.v - ref_value.v).max()
    total = sum(len(s) for _, s in samples)
    report(
        "update-rule-audit",
        total > 0 and theta_err <= 1e-12 and v_err <= 1e-12,
        f"{total} updates, max theta err {theta_err:.1e}, max v err {v_err:.1e}",
    )


def test_feedback_case_statistics():
    scenario_base = FeedbackScenario(
        "helpful", "ideal", 1.0, 0.0, {0: frozenset({0})}
    )
    failures = []
    for case, (p_give, p_flip) in CASES.items():
        scenario = FeedbackScenario(
            "helpful", case, p_give, p_flip, scenario_base.preferred
        )
        rng = np.random.default_rng(hash(case) % 2**31)
        n = 10_000
        events = [oracle_feedback(scenario, 0, 0, rng) for _ in range(n)]
        given = [e for e in events if e is not None]
        availability = len(given) / n
        if abs(availability - p_give) > 0.02:
            failures.append(f"{case}: availability {availability:.3f}")
        if given:
            flipped = sum(e.value == -1 for e in given) / len(given)
            if abs(flipped - p_flip) > 0.02:
                failures.append(f"{case}: flip rate {flipped:.3f}")
    report(
        "feedback-case-statistics",
        not failures,
        "all four cases within +/-2% of (p_give, p_flip)"
        if not failures
        else "; ".join(failures),
    )


def shortest_safe_path_length() -> int:
    """Independent BFS oracle over the shipped map, danger cells blocked."""
    env = envs.make("four_rooms")
    blocked = env.walls | env.danger
    queue = deque([(env.start, 0)])
    seen = {env.start}
    while queue:
        pos, d = queue.popleft()
        if pos == env.goal:
            return d
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nxt = (pos[0] + dr, pos[1] + dc)
            if (
                0 <= nxt[0] < env.height
                and 0 <= nxt[1] < env.width
                and nxt not in blocked
                and nxt not in seen
            ):
                seen.add(nxt)
                queue.append((nxt, d + 1))
    raise AssertionError("goal unreachable on the shipped map")


def test_convergence_four_rooms_helpful_ideal():
    started = time.perf_counter()
    curve = experiment("four_rooms", "pacman", "helpful", "ideal", 500)
    elapsed = time.perf_counter() - started
    l_star = shortest_safe_path_length()
    threshold = (5 - l_star) - 1
    final50 = float(curve.returns[:, -50:].mean())
    report(
        "convergence",
        final50 >= threshold and elapsed < 300.0,
        f"final-50 mean {final50:.2f} >= {threshold} (L*={l_star}), {elapsed:.0f}s < 300s",
    )


def test_jump_start_ordering():
    lines = []
    ok = True
    for intent in ("helpful", "misleading"):
        pac = experiment("four_rooms", "pacman", intent, "ideal", 20)
        achf = experiment("four_rooms", "ac_hf", intent, "ideal", 20)
        pac_means = pac.returns.mean(axis=1)
        achf_means = achf.returns.mean(axis=1)
        wins = int((pac_means > achf_means).sum())
        ok = ok and wins >= 8
        lines.append(f"{intent}: {wins}/10 paired wins")
    report("jump-start-ordering", ok, "; ".join(lines))


def test_robustness_across_cases():
    lines = []
    ok = True
    for env_id, eps in (("four_rooms", 500), ("taxi", 1000)):
        for intent in ("helpful", "misleading"):
            ideal = experiment(env_id, "pacman", intent, "ideal", eps)
            noisy = experiment(
                env_id, "pacman", intent, "infrequent_inconsistent", eps
            )
            v_ideal = float(ideal.returns[:, -50:].mean())
            v_noisy = float(noisy.returns[:, -50:].mean())
            gap = abs(v_noisy - v_ideal)
            limit = 0.1 * abs(v_ideal)
            ok = ok and gap <= limit
            lines.append(
                f"{env_id}/{intent}: ideal {v_ideal:.2f}, noisy {v_noisy:.2f}, "
                f"gap {gap:.3f} <= {limit:.3f}"
            )
    report("robustness", ok, "; ".join(lines))


def test_taxi_misleading_safety():
    pacman_pickups = 0
    for intent in ("helpful", "misleading"):
        for case in ("ideal", "infrequent_inconsistent"):
            curve = experiment("taxi", "pacman", intent, case, 1000)
            pacman_pickups += sum(s.improper_pickups for s in curve.stats)
    achf = experiment("taxi", "ac_hf", "misleading", "ideal", 1000)
    achf_runs = sum(1 for s in achf.stats if s.improper_pickups >= 1)
    report(
        "taxi-misleading-safety",
        pacman_pickups == 0 and achf_runs >= 8,
        f"planner-led improper pickups {pacman_pickups} (must be 0); "
        f"ablation runs with >=1: {achf_runs}/10",
    )


def test_reproducibility(tmp_path):
    cfg = ExperimentConfig(
        env="four_rooms", algorithm="pacman", intent="helpful", case="infrequent",
        maxepisode=50, seeds=(0, 1), log_steps=True,
    )
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    run_experiment(cfg, output=out1)
    run_experiment(cfg, output=out2)
    mismatched = []
    for name in sorted(os.listdir(out1)):
        if not name.endswith(".csv"):
            continue
        with open(os.path.join(out1, name), "rb") as f1:
            b1 = f1.read()
        with open(os.path.join(out2, name), "rb") as f2:
            b2 = f2.read()
        if b1 != b2:
            mismatched.append(name)
    report(
        "reproducibility",
        not mismatched,
        "byte-identical CSVs" if not mismatched else f"differs: {mismatched}",
    )


def test_secondary_protocol_differential():
    """[SECONDARY] scripted client replaying the ideal-helpful oracle through
    the service matches the headless run within 5%."""
    from fastapi.testclient import TestClient
    from pacman_lab.feedback import build_scenario
    from pacman_lab.trainer_service import create_app
    from test_trainer_service import scripted_oracle_replay

    seed = 3
    episodes = 150
    config = {
        "env": "four_rooms", "algorithm": "pacman", "maxepisode": episodes,
        "seeds": [seed], "log_steps": False,
    }
    headless = run_experiment(
        ExperimentConfig(**{**config, "seeds": (seed,), "intent": "helpful",
                            "case": "ideal"})
    )
    scenario = build_scenario(envs.make("four_rooms"), "helpful", "ideal")
    with TestClient(create_app()) as client:
        snap = scripted_oracle_replay(client, config, scenario, seed)
    protocol_mean = float(np.mean(snap["returns"][-50:]))
    headless_mean = float(headless.returns[0, -50:].mean())
    gap = abs(protocol_mean - headless_mean)
    limit = 0.05 * abs(headless_mean)
    report(
        "secondary-protocol-differential",
        snap["status"] == "done" and gap <= limit,
        f"protocol {protocol_mean:.2f} vs headless {headless_mean:.2f}, "
        f"gap {gap:.3f} <= {limit:.3f}",
    )
