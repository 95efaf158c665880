"""Trainer session service.

Lets a human watch planner-led episodes step by step and inject +1/-1
feedback that enters the learning loop exactly where the scripted oracle
would. Sessions are served over HTTP plus a websocket event stream carrying
versioned JSON messages.

Protocol (all messages ``{"v": 1, "seq": n, "kind": ..., "payload": ...}``,
sequence numbers gapless per session, full replay from seq 0 on attach):

* ``snapshot``      session description: env layout, actions, pacing, status,
                    current preference/value tables, per-episode returns.
* ``plan_update``   after every re-plan: timestamped steps (``action`` null
                    for skipped timestamps) or a planner timeout.
* ``state_update``  after every environment transition: state key, reward,
                    terminal flag, running return.
* ``feedback``      echo of every accepted human feedback submission.
* ``control``       status changes: pause/resume, speed, episode ends,
                    session completion, dropped-feedback count.

A step's policy update is deferred until the next pacing gate so the trainer
can react to what they just saw; the critic/actor updates themselves are the
standard ones and end-of-episode tables match the headless loop exactly
(within an episode the plan is fixed, so update timing cannot change what is
executed). Feedback arriving while paused is rejected; feedback outside the
attribution window is dropped and counted.
"""

from __future__ import annotations

import asyncio
import functools
import queue
import threading
import time
import uuid
from typing import Optional

import anyio
import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from . import planner
from .actor_critic import PolicyParams, TransitionSample, ValueParams, ac_update
from .feedback import ChannelClosedError, FeedbackChannel, build_scenario, oracle_feedback
from .harness import TabularPolicyAdapter, build_problem, run_streams
from .harness.config import ExperimentConfig

PROTOCOL_VERSION = 1
_CLOSE = object()


class SessionError(Exception):
    pass


class Session:
    """One learner run plus its event stream and feedback channel."""

    def __init__(
        self,
        config: ExperimentConfig,
        pacing: str = "timed",
        interval_ms: int = 400,
        window_s: float = 1.0,
    ):
        if config.algorithm != "pacman":
            raise SessionError("live sessions drive the planner-led learner only")
        if pacing not in ("timed", "ondemand"):
            raise SessionError(f"unknown pacing {pacing!r}")
        self.id = uuid.uuid4().hex[:12]
        self.config = config
        self.pacing = pacing
        self.interval_ms = interval_ms
        self.window_s = window_s

        self.env = config.make_env()
        self.maxstamp = config.resolved_maxstamp(self.env)
        self.hyper = config.hyper()
        self.policy = PolicyParams(self.env.n_states, len(self.env.actions))
        self.value = ValueParams(self.env.n_states)
        self.value.v.fill(config.resolved_v_init())
        self.channel = FeedbackChannel(window=window_s)
        self.returns: list[float] = []
        self.episode = 0
        self.step_count = 0  # monotone across the whole session

        self._scenario = (
            build_scenario(self.env, config.intent, config.case)
            if config.feedback == "oracle"
            else None
        )

        self._lock = threading.Lock()
        self._messages: list[dict] = []
        self._subscribers: list = []
        self._paused = False
        self._stop = threading.Event()
        self._permits = threading.Semaphore(0)
        self.status = "running"
        self.rejected_feedback = 0
        self._thread = threading.Thread(target=self._run, daemon=True)

    # -- event stream ---------------------------------------------------------

    def _emit(self, kind: str, payload: dict) -> None:
        with self._lock:
            message = {
                "v": PROTOCOL_VERSION,
                "seq": len(self._messages),
                "kind": kind,
                "payload": payload,
            }
            self._messages.append(message)
            for q in self._subscribers:
                q.put(message)

    def subscribe(self):
        q = queue.Queue()
        with self._lock:
            for message in self._messages:
                q.put(message)
            if self.status in ("done", "stopped", "error"):
                q.put(_CLOSE)
            else:
                self._subscribers.append(q)
        return q

    def unsubscribe(self, q) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _finish(self, status: str) -> None:
        self.status = status
        self._emit("control", self._control_payload())
        with self._lock:
            for q in self._subscribers:
                q.put(_CLOSE)
            self._subscribers.clear()

    # -- payload builders -------------------------------------------------------

    def _control_payload(self) -> dict:
        return {
            "status": self.status,
            "pacing": self.pacing,
            "interval_ms": self.interval_ms,
            "episode": self.episode,
            "dropped_feedback": self.channel.dropped,
            "rejected_feedback": self.rejected_feedback,
        }

    def snapshot_payload(self) -> dict:
        return {
            "env": self.env.name,
            "algorithm": self.config.algorithm,
            "feedback": self.config.feedback,
            "layout": self.env.layout(),
            "actions": list(self.env.actions),
            "maxepisode": self.config.maxepisode,
            "window_s": self.window_s,
            "theta": [[float(x) for x in row] for row in self.policy.theta],
            "v": [float(x) for x in self.value.v],
            "returns": list(self.returns),
            **self._control_payload(),
        }

    # -- learner thread -----------------------------------------------------------

    def start(self) -> None:
        self._emit("snapshot", self.snapshot_payload())
        self._thread.start()

    def _gate(self) -> bool:
        """Pacing gate before each transition; False when the session stops."""
        if self.pacing == "ondemand":
            while not self._stop.is_set():
                if self._permits.acquire(timeout=0.05):
                    break
        else:
            deadline = time.monotonic() + self.interval_ms / 1000.0
            while not self._stop.is_set() and time.monotonic() < deadline:
                time.sleep(min(0.02, self.interval_ms / 1000.0))
        while self._paused and not self._stop.is_set():
            time.sleep(0.02)
        return not self._stop.is_set()

    def _feedback_for(self, episode: int, step: int, s: int, a: int):
        if self.config.feedback == "live":
            return self.channel.poll(episode, step)
        if self._scenario is not None:
            return oracle_feedback(self._scenario, s, a, self._fb_rng, episode, step)
        return None

    def _finalize(self, pending) -> None:
        episode, step, sample = pending
        fb = self._feedback_for(episode, step, sample.s, sample.a)
        ac_update(
            self.policy, self.value, sample, self.hyper,
            fb.value if fb else None,
        )

    def _run(self) -> None:
        try:
            env = self.env
            agent_rng, self._fb_rng = run_streams(self.config.seeds[0])
            problem = build_problem(env, TabularPolicyAdapter(env, self.policy))
            for episode in range(self.config.maxepisode):
                self.episode = episode
                if self._stop.is_set():
                    break
                problem.policy.invalidate()
                plan = planner.solve(problem, self.maxstamp, agent_rng)
                self._emit("plan_update", _plan_payload(env, episode, plan))
                if plan is None:
                    self.returns.append(0.0)
                    self._emit("control", {**self._control_payload(), "episode_return": 0.0})
                    continue
                episode_return = 0.0
                s = env.reset()
                pending = None
                step_index = 0
                for i, st in enumerate(plan.steps):
                    if st.action is None:
                        continue
                    if not self._gate():
                        break
                    if pending is not None:
                        self._finalize(pending)
                    a = env.actions.index(st.action)
                    out = env.step(s, a)
                    episode_return += out.reward
                    sample = TransitionSample(s, a, out.reward, out.next_state, out.terminal)
                    self.channel.record_display(episode, step_index, time.monotonic())
                    self._emit(
                        "state_update",
                        {
                            "episode": episode,
                            "step": step_index,
                            "state": env.state_key(out.next_state),
                            "prev_state": env.state_key(s),
                            "action": env.actions[a],
                            "reward": out.reward,
                            "terminal": out.terminal,
                            "episode_return": episode_return,
                        },
                    )
                    pending = (episode, step_index, sample)
                    step_index += 1
                    self.step_count += 1
                    expected = (
                        plan.steps[i + 1].state if i + 1 < len(plan.steps) else plan.terminal
                    )
                    if env.world_state(out.next_state) != expected or out.terminal:
                        break
                    s = out.next_state
                if pending is not None and not self._stop.is_set():
                    # one more reaction window for the last displayed step
                    self._gate()
                    self._finalize(pending)
                if self._stop.is_set():
                    break
                self.returns.append(episode_return)
                self._emit(
                    "control",
                    {**self._control_payload(), "episode_return": episode_return},
                )
            self.channel.close()
            self._finish("stopped" if self._stop.is_set() else "done")
        except Exception as exc:  # pragma: no cover - defensive
            self.status = "error"
            self._emit("control", {**self._control_payload(), "error": str(exc)})
            self._finish("error")

    # -- external controls ------------------------------------------------------

    def submit_feedback(self, value: int, client_ts: Optional[float]) -> dict:
        if self.status != "running":
            return {"accepted": False, "reason": self.status}
        if self._paused:
            self.rejected_feedback += 1
            return {"accepted": False, "reason": "paused"}
        try:
            event = self.channel.submit(value, time.monotonic())
        except ChannelClosedError:
            return {"accepted": False, "reason": "closed"}
        if event is None:
            return {
                "accepted": False,
                "reason": "outside-window",
                "dropped_feedback": self.channel.dropped,
            }
        self._emit(
            "feedback",
            {
                "episode": event.episode,
                "step": event.step,
                "value": event.value,
                "client_ts": client_ts,
            },
        )
        return {"accepted": True, "episode": event.episode, "step": event.step}

    def control(self, action: str, interval_ms: Optional[int] = None) -> dict:
        if action == "pause":
            self._paused = True
        elif action == "resume":
            self._paused = False
        elif action == "speed":
            if not interval_ms or interval_ms < 1:
                raise SessionError("speed needs interval_ms >= 1")
            self.interval_ms = interval_ms
        elif action == "step":
            if self.pacing != "ondemand":
                raise SessionError("step control only applies to ondemand pacing")
            self._permits.release()
        elif action == "stop":
            self._stop.set()
        else:
            raise SessionError(f"unknown control action {action!r}")
        payload = self._control_payload()
        payload["status"] = "paused" if self._paused and self.status == "running" else self.status
        self._emit("control", payload)
        return payload


def _plan_payload(env, episode: int, plan) -> dict:
    if plan is None:
        return {"episode": episode, "timeout": True, "steps": [], "terminal": None}
    return {
        "episode": episode,
        "timeout": False,
        "steps": [
            {
                "t": st.timestamp,
                "state": env.state_key(env.state_id_of(st.state)),
                "action": st.action,
            }
            for st in plan.steps
        ],
        "terminal": env.state_key(env.state_id_of(plan.terminal)),
    }


# ---------------------------------------------------------------------------
# HTTP surface


class CreateSessionBody(BaseModel):
    config: dict
    pacing: str = "timed"
    interval_ms: int = 400
    window_s: float = 1.0


class FeedbackBody(BaseModel):
    value: int
    client_ts: Optional[float] = None


class ControlBody(BaseModel):
    action: str
    interval_ms: Optional[int] = None


def create_app() -> FastAPI:
    app = FastAPI(title="pacman-lab trainer service")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions")
    def start_session(body: CreateSessionBody):
        try:
            raw = dict(body.config)
            if "seeds" in raw:
                raw["seeds"] = tuple(raw["seeds"])
            raw.setdefault("feedback", "live")
            config = ExperimentConfig(**raw)
            session = Session(config, body.pacing, body.interval_ms, body.window_s)
        except (TypeError, ValueError, SessionError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        sessions[session.id] = session
        session.start()
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}/snapshot")
    def snapshot(session_id: str):
        return get_session(session_id).snapshot_payload()

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, body: FeedbackBody):
        if body.value not in (1, -1):
            raise HTTPException(status_code=400, detail="value must be +1 or -1")
        return get_session(session_id).submit_feedback(body.value, body.client_ts)

    @app.post("/sessions/{session_id}/control")
    def control(session_id: str, body: ControlBody):
        try:
            return get_session(session_id).control(body.action, body.interval_ms)
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.delete("/sessions/{session_id}")
    def stop(session_id: str):
        session = get_session(session_id)
        session.control("stop")
        return {"status": session.status}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        q = session.subscribe()

        async def pump():
            while True:
                try:
                    message = await anyio.to_thread.run_sync(
                        functools.partial(q.get, timeout=0.2)
                    )
                except queue.Empty:
                    continue
                if message is _CLOSE:
                    return
                await websocket.send_json(message)

        async def watch_disconnect():
            while True:
                message = await websocket.receive()
                if message["type"] == "websocket.disconnect":
                    return

        try:
            tasks = [asyncio.create_task(pump()), asyncio.create_task(watch_disconnect())]
            done, pending = await asyncio.wait(tasks, return_when=asyncio.FIRST_COMPLETED)
            for task in pending:
                task.cancel()
            for task in pending:
                try:
                    await task
                except (asyncio.CancelledError, WebSocketDisconnect):
                    pass
        except WebSocketDisconnect:
            pass
        finally:
            session.unsubscribe(q)
            try:
                await websocket.close()
            except RuntimeError:
                pass

    return app
