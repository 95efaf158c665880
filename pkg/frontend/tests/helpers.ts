/**
 * Scripted protocol server for tests: a mock socket the test pushes stream
 * messages through, plus a fetch stub implementing the documented feedback
 * window rule (attribute to the most recent displayed step when the
 * submission arrives within the window, last click wins, otherwise drop and
 * count). Time is a manual clock shared with the client under test.
 */

import { ProtocolMessage } from "../src/protocol";
import { SocketLike } from "../src/client";

export class Clock {
  ms = 0;
  now = (): number => this.ms;
  advance(deltaMs: number): void {
    this.ms += deltaMs;
  }
}

export class MockSocket implements SocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  closedByClient = false;
  close(): void {
    this.closedByClient = true;
    this.onclose?.();
  }
}

export interface AcceptedFeedback {
  episode: number;
  step: number;
  value: number;
}

export class MockServer {
  readonly clock: Clock;
  readonly windowS: number;
  sockets: MockSocket[] = [];
  seq = 0;
  display: { episode: number; step: number; shownAt: number } | null = null;
  accepted: AcceptedFeedback[] = [];
  dropped = 0;
  feedbackPosts = 0;
  paused = false;

  constructor(clock: Clock, windowS = 1.0) {
    this.clock = clock;
    this.windowS = windowS;
  }

  socketFactory = (_url: string): MockSocket => {
    const socket = new MockSocket();
    this.sockets.push(socket);
    queueMicrotask(() => socket.onopen?.());
    return socket;
  };

  push(kind: ProtocolMessage["kind"], payload: unknown): void {
    const message = { v: 1, seq: this.seq++, kind, payload } as ProtocolMessage;
    const socket = this.sockets[this.sockets.length - 1];
    socket?.onmessage?.({ data: JSON.stringify(message) });
  }

  displayStep(episode: number, step: number, state = "1,1"): void {
    this.display = { episode, step, shownAt: this.clock.now() };
    this.push("state_update", {
      episode,
      step,
      state,
      prev_state: state,
      action: "up",
      reward: -1,
      terminal: false,
      episode_return: -(step + 1),
    });
  }

  fetchFn = (async (url: string, init?: RequestInit) => {
    const body = init?.body ? JSON.parse(String(init.body)) : {};
    if (url.endsWith("/feedback")) {
      this.feedbackPosts += 1;
      if (this.paused) {
        return jsonResponse({ accepted: false, reason: "paused" });
      }
      const arrived = this.clock.now();
      const d = this.display;
      if (!d || arrived < d.shownAt || arrived > d.shownAt + this.windowS * 1000) {
        this.dropped += 1;
        return jsonResponse({
          accepted: false,
          reason: "outside-window",
          dropped_feedback: this.dropped,
        });
      }
      const event = { episode: d.episode, step: d.step, value: body.value };
      // last click in a window wins
      const last = this.accepted[this.accepted.length - 1];
      if (last && last.episode === event.episode && last.step === event.step) {
        this.accepted[this.accepted.length - 1] = event;
      } else {
        this.accepted.push(event);
      }
      this.push("feedback", { ...event, client_ts: body.client_ts ?? null });
      return jsonResponse({ accepted: true, episode: d.episode, step: d.step });
    }
    if (url.endsWith("/control")) {
      if (body.action === "pause") this.paused = true;
      if (body.action === "resume") this.paused = false;
      return jsonResponse({ status: this.paused ? "paused" : "running" });
    }
    throw new Error(`unexpected fetch ${url}`);
  }) as unknown as typeof fetch;
}

function jsonResponse(payload: unknown): Response {
  return {
    ok: true,
    status: 200,
    json: async () => payload,
  } as unknown as Response;
}

export function snapshotPayload(overrides: Record<string, unknown> = {}) {
  return {
    env: "four_rooms",
    algorithm: "pacman",
    feedback: "live",
    layout: {
      kind: "four_rooms",
      height: 10,
      width: 10,
      walls: [[4, 0] as [number, number]],
      danger: [[3, 7] as [number, number]],
      start: [5, 2] as [number, number],
      goal: [0, 9] as [number, number],
    },
    actions: ["up", "down", "left", "right"],
    maxepisode: 100,
    window_s: 1.0,
    theta: [],
    v: [],
    returns: [],
    status: "running",
    pacing: "ondemand",
    interval_ms: 400,
    episode: 0,
    dropped_feedback: 0,
    rejected_feedback: 0,
    ...overrides,
  };
}
