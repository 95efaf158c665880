/**
 * Session client: websocket event stream plus the REST feedback/control
 * calls. The socket and fetch implementations are injectable so tests can
 * drive the client with scripted servers and fake clocks.
 *
 * Feedback is only ever sent from the public `submitFeedback` method, which
 * the view wires to buttons and keys: no message leaves without a gesture.
 */

import { FeedbackAck, ProtocolMessage } from "./protocol.js";
import { ViewModel, applyMessage, initialViewModel } from "./viewModel.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface ClientOptions {
  baseUrl?: string;
  socketFactory?: (url: string) => SocketLike;
  fetchFn?: typeof fetch;
  now?: () => number;
  reconnectDelayMs?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
}

export type Listener = (vm: ViewModel) => void;

export class SessionClient {
  readonly sessionId: string;
  vm: ViewModel;
  private listeners: Listener[] = [];
  private socket: SocketLike | null = null;
  private stopped = false;
  private readonly baseUrl: string;
  private readonly makeSocket: (url: string) => SocketLike;
  private readonly fetchFn: typeof fetch;
  private readonly now: () => number;
  private readonly reconnectDelayMs: number;
  private readonly schedule: (fn: () => void, ms: number) => unknown;

  constructor(sessionId: string, options: ClientOptions = {}) {
    this.sessionId = sessionId;
    this.vm = initialViewModel();
    this.baseUrl = options.baseUrl ?? "";
    this.makeSocket =
      options.socketFactory ??
      ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.now = options.now ?? (() => Date.now());
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
    this.schedule = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
  }

  onChange(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.vm);
  }

  private set(vm: ViewModel): void {
    this.vm = vm;
    this.notify();
  }

  connect(): void {
    const wsBase = this.baseUrl.replace(/^http/, "ws");
    this.socket = this.makeSocket(`${wsBase}/sessions/${this.sessionId}/stream`);
    this.socket.onopen = () => this.set({ ...this.vm, connection: "open" });
    this.socket.onmessage = (ev) => {
      const message = JSON.parse(ev.data) as ProtocolMessage;
      this.set(applyMessage(this.vm, message, this.now()));
    };
    this.socket.onclose = () => {
      if (this.stopped || ["done", "stopped", "error"].includes(this.vm.status)) {
        this.set({ ...this.vm, connection: "closed" });
        return;
      }
      // never drop silently: surface the reconnect state and retry
      this.set({ ...this.vm, connection: "reconnecting" });
      this.schedule(() => {
        if (!this.stopped) this.connect();
      }, this.reconnectDelayMs);
    };
  }

  disconnect(): void {
    this.stopped = true;
    this.socket?.close();
  }

  /** Send one +1/-1 feedback signal; call only from a user gesture. */
  async submitFeedback(value: 1 | -1): Promise<FeedbackAck> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/feedback`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ value, client_ts: this.now() / 1000 }),
      }
    );
    const ack = (await response.json()) as FeedbackAck;
    if (!ack.accepted && typeof ack.dropped_feedback === "number") {
      this.set({ ...this.vm, droppedFeedback: ack.dropped_feedback });
    }
    if (!ack.accepted && ack.reason === "paused") {
      this.set({ ...this.vm, rejectedFeedback: this.vm.rejectedFeedback + 1 });
    }
    return ack;
  }

  async control(
    action: "pause" | "resume" | "speed" | "step" | "stop",
    intervalMs?: number
  ): Promise<unknown> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/control`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ action, interval_ms: intervalMs ?? null }),
      }
    );
    return response.json();
  }
}

export async function createSession(
  config: Record<string, unknown>,
  options: {
    baseUrl?: string;
    fetchFn?: typeof fetch;
    pacing?: string;
    intervalMs?: number;
    windowS?: number;
  } = {}
): Promise<string> {
  const fetchFn = options.fetchFn ?? fetch.bind(globalThis);
  const response = await fetchFn(`${options.baseUrl ?? ""}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({
      config,
      pacing: options.pacing ?? "timed",
      interval_ms: options.intervalMs ?? 400,
      window_s: options.windowS ?? 1.0,
    }),
  });
  if (!response.ok) {
    throw new Error(`session create failed: ${response.status}`);
  }
  const body = (await response.json()) as { session_id: string };
  return body.session_id;
}
