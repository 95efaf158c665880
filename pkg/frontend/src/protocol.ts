/**
 * Message types for the trainer session protocol (version 1).
 *
 * The stream carries `{v, seq, kind, payload}` JSON objects with gapless
 * per-session sequence numbers; feedback and controls go over REST.
 */

export const PROTOCOL_VERSION = 1;

export type MessageKind =
  | "snapshot"
  | "plan_update"
  | "state_update"
  | "feedback"
  | "control";

export interface Layout {
  kind: "four_rooms" | "taxi" | "grid3";
  height: number;
  width: number;
  walls?: [number, number][];
  danger?: [number, number][];
  start?: [number, number];
  goal?: [number, number];
  barriers?: [number, number][][];
  landmarks?: Record<string, [number, number]>;
  passenger?: string;
  destination?: string;
  taxi_start?: [number, number];
}

export interface SnapshotPayload {
  env: string;
  algorithm: string;
  feedback: string;
  layout: Layout;
  actions: string[];
  maxepisode: number;
  window_s: number;
  theta: number[][];
  v: number[];
  returns: number[];
  status: string;
  pacing: string;
  interval_ms: number;
  episode: number;
  dropped_feedback: number;
  rejected_feedback: number;
}

export interface PlanStep {
  t: number;
  state: string;
  action: string | null;
}

export interface PlanUpdatePayload {
  episode: number;
  timeout: boolean;
  steps: PlanStep[];
  terminal: string | null;
}

export interface StateUpdatePayload {
  episode: number;
  step: number;
  state: string;
  prev_state: string;
  action: string;
  reward: number;
  terminal: boolean;
  episode_return: number;
}

export interface FeedbackPayload {
  episode: number;
  step: number;
  value: number;
  client_ts: number | null;
}

export interface ControlPayload {
  status: string;
  pacing: string;
  interval_ms: number;
  episode: number;
  dropped_feedback: number;
  rejected_feedback: number;
  episode_return?: number;
  error?: string;
}

export interface ProtocolMessage {
  v: number;
  seq: number;
  kind: MessageKind;
  payload:
    | SnapshotPayload
    | PlanUpdatePayload
    | StateUpdatePayload
    | FeedbackPayload
    | ControlPayload;
}

export interface FeedbackAck {
  accepted: boolean;
  reason?: string;
  episode?: number;
  step?: number;
  dropped_feedback?: number;
}

/** Parse an environment state key ("r,c", "r,c,onboard", "loc" or "done"). */
export function parsePose(
  layout: Layout | null,
  key: string
): { row: number; col: number; onboard: boolean } | null {
  if (!layout) return null;
  if (key === "done") {
    const dest = layout.destination && layout.landmarks?.[layout.destination];
    return dest ? { row: dest[0], col: dest[1], onboard: false } : null;
  }
  const parts = key.split(",").map(Number);
  if (parts.some(Number.isNaN)) return null;
  if (layout.kind === "grid3" && parts.length === 1) {
    return { row: 0, col: parts[0] - 1, onboard: false };
  }
  if (parts.length >= 2) {
    return { row: parts[0], col: parts[1], onboard: parts[2] === 1 };
  }
  return null;
}
