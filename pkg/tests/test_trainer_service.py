import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from pacman_lab import envs
from pacman_lab.actor_critic import PolicyParams, ValueParams
from pacman_lab.feedback import CASES, FeedbackScenario
from pacman_lab.harness import (
    ExperimentConfig,
    TabularPolicyAdapter,
    build_problem,
    make_oracle_feedback_fn,
    run_experiment,
    run_pacman_episode,
    run_streams,
)
from pacman_lab.trainer_service import create_app


@pytest.fixture()
def client():
    app = create_app()
    with TestClient(app) as c:
        yield c


def wait_done(client, sid, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        snap = client.get(f"/sessions/{sid}/snapshot").json()
        if snap["status"] in ("done", "stopped", "error"):
            return snap
        time.sleep(0.02)
    pytest.fail("session did not finish in time")


GRID3_CONFIG = {
    "env": "grid3",
    "algorithm": "pacman",
    "feedback": "none",
    "maxepisode": 25,
    "seeds": [7],
    "log_steps": False,
}


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/snapshot").status_code == 404
    assert client.post("/sessions/nope/feedback", json={"value": 1}).status_code == 404


def test_rejects_non_pacman_sessions(client):
    body = {"config": {**GRID3_CONFIG, "algorithm": "bql_shaping"}}
    assert client.post("/sessions", json=body).status_code == 400


def test_timed_session_never_blocks_on_the_human(client):
    body = {"config": GRID3_CONFIG, "pacing": "timed", "interval_ms": 1}
    sid = client.post("/sessions", json=body).json()["session_id"]
    snap = wait_done(client, sid)
    assert snap["status"] == "done"
    assert len(snap["returns"]) == 25


def test_no_feedback_session_matches_headless_run(client):
    body = {"config": GRID3_CONFIG, "pacing": "timed", "interval_ms": 1}
    sid = client.post("/sessions", json=body).json()["session_id"]
    snap = wait_done(client, sid)

    headless = run_experiment(ExperimentConfig(**{**GRID3_CONFIG, "seeds": (7,)}))
    assert snap["returns"] == [float(x) for x in headless.returns[0]]


def test_stream_is_gapless_and_replays_from_zero(client):
    body = {"config": GRID3_CONFIG, "pacing": "timed", "interval_ms": 1}
    sid = client.post("/sessions", json=body).json()["session_id"]
    wait_done(client, sid)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        messages = []
        while True:
            try:
                messages.append(ws.receive_json())
            except Exception:
                break
    assert messages, "no messages replayed"
    assert [m["seq"] for m in messages] == list(range(len(messages)))
    kinds = {m["kind"] for m in messages}
    assert {"snapshot", "plan_update", "state_update", "control"} <= kinds
    assert all(m["v"] == 1 for m in messages)


def test_feedback_while_paused_is_rejected(client):
    body = {"config": {**GRID3_CONFIG, "feedback": "live", "maxepisode": 500},
            "pacing": "ondemand"}
    sid = client.post("/sessions", json=body).json()["session_id"]
    client.post(f"/sessions/{sid}/control", json={"action": "pause"})
    out = client.post(f"/sessions/{sid}/feedback", json={"value": 1}).json()
    assert out == {"accepted": False, "reason": "paused"}
    client.delete(f"/sessions/{sid}")


def test_feedback_outside_window_is_dropped_and_counted(client):
    body = {
        "config": {**GRID3_CONFIG, "feedback": "live", "maxepisode": 500},
        "pacing": "ondemand",
        "window_s": 0.1,
    }
    sid = client.post("/sessions", json=body).json()["session_id"]
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        client.post(f"/sessions/{sid}/control", json={"action": "step"})
        while True:
            msg = ws.receive_json()
            if msg["kind"] == "state_update":
                break
        time.sleep(0.25)  # longer than the attribution window
        out = client.post(f"/sessions/{sid}/feedback", json={"value": 1}).json()
    assert out["accepted"] is False
    assert out["reason"] == "outside-window"
    assert out["dropped_feedback"] >= 1
    client.delete(f"/sessions/{sid}")


def test_bad_control_and_bad_value(client):
    body = {"config": GRID3_CONFIG, "pacing": "ondemand"}
    sid = client.post("/sessions", json=body).json()["session_id"]
    assert (
        client.post(f"/sessions/{sid}/control", json={"action": "warp"}).status_code
        == 400
    )
    assert (
        client.post(f"/sessions/{sid}/feedback", json={"value": 3}).status_code == 400
    )
    client.delete(f"/sessions/{sid}")


def scripted_oracle_replay(client, config, scenario, seed, window_s=5.0):
    """Drive a live session, replaying the oracle through the protocol."""
    body = {"config": {**config, "feedback": "live"}, "pacing": "ondemand",
            "window_s": window_s}
    sid = client.post("/sessions", json=body).json()["session_id"]
    env = envs.make(config["env"])
    _, fb_rng = run_streams(seed)
    fn = make_oracle_feedback_fn(scenario, fb_rng)

    def grant():
        client.post(f"/sessions/{sid}/control", json={"action": "step"})

    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        while True:
            msg = ws.receive_json()
            if msg["kind"] == "plan_update":
                if not msg["payload"]["timeout"]:
                    grant()
            elif msg["kind"] == "state_update":
                p = msg["payload"]
                s = env.parse_state_key(p["prev_state"])
                a = env.actions.index(p["action"])
                event = fn(p["episode"], p["step"], s, a)
                if event is not None:
                    out = client.post(
                        f"/sessions/{sid}/feedback",
                        json={"value": event.value, "client_ts": time.monotonic()},
                    ).json()
                    assert out["accepted"], out
                    assert (out["episode"], out["step"]) == (p["episode"], p["step"])
                grant()
            elif msg["kind"] == "control" and msg["payload"]["status"] in (
                "done",
                "stopped",
            ):
                break
    return client.get(f"/sessions/{sid}/snapshot").json()


def test_protocol_oracle_replay_matches_headless_exactly(client):
    # same seed, same oracle stream: the protocol path must reproduce the
    # headless trajectory step for step
    seed = 11
    config = {"env": "grid3", "algorithm": "pacman", "maxepisode": 40,
              "seeds": [seed], "log_steps": False}
    scenario = FeedbackScenario(
        "helpful", "ideal", *CASES["ideal"],
        {0: frozenset({1}), 1: frozenset({1})},
    )
    snap = scripted_oracle_replay(client, config, scenario, seed)
    assert snap["status"] == "done"

    env = envs.make("grid3")
    policy = PolicyParams(env.n_states, len(env.actions))
    value = ValueParams(env.n_states)
    value.v.fill(ExperimentConfig(**{**config, "seeds": (seed,)}).resolved_v_init())
    problem = build_problem(env, TabularPolicyAdapter(env, policy))
    agent_rng, fb_rng = run_streams(seed)
    fn = make_oracle_feedback_fn(scenario, fb_rng)
    hyper = ExperimentConfig(**{**config, "seeds": (seed,)}).hyper()
    maxstamp = ExperimentConfig(**{**config, "seeds": (seed,)}).resolved_maxstamp(env)
    headless = [
        run_pacman_episode(env, policy, value, fn, hyper, maxstamp, agent_rng,
                           episode, problem).episode_return
        for episode in range(40)
    ]
    assert snap["returns"] == [float(x) for x in headless]
    # the learned tables exported over the protocol match too
    assert np.allclose(np.array(snap["theta"]), policy.theta)
    assert np.allclose(np.array(snap["v"]), value.v)
