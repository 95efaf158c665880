/**
 * The view model is a pure function of the received protocol messages (plus
 * the local receive clock used for the attribution countdown), so a recorded
 * message log replays to the identical state.
 */

import {
  ControlPayload,
  FeedbackPayload,
  Layout,
  PlanUpdatePayload,
  ProtocolMessage,
  SnapshotPayload,
  StateUpdatePayload,
  parsePose,
} from "./protocol.js";

export type Connection = "connecting" | "open" | "reconnecting" | "closed";

export interface PlanRow {
  t: number;
  action: string | null;
  done: boolean;
}

export interface ViewModel {
  connection: Connection;
  status: string;
  lastSeq: number;
  seqGap: boolean;
  layout: Layout | null;
  actions: string[];
  pacing: string;
  intervalMs: number;
  windowS: number;
  episode: number;
  step: number;
  episodeReturn: number;
  agent: { row: number; col: number; onboard: boolean } | null;
  terminal: boolean;
  lastReward: number | null;
  plan: PlanRow[];
  planTimeout: boolean;
  returns: number[];
  droppedFeedback: number;
  rejectedFeedback: number;
  lastFeedback: { episode: number; step: number; value: number } | null;
  lastDisplayAt: number | null; // local clock ms of the latest state_update
  maxepisode: number;
}

export function initialViewModel(): ViewModel {
  return {
    connection: "connecting",
    status: "unknown",
    lastSeq: -1,
    seqGap: false,
    layout: null,
    actions: [],
    pacing: "timed",
    intervalMs: 400,
    windowS: 1.0,
    episode: 0,
    step: 0,
    episodeReturn: 0,
    agent: null,
    terminal: false,
    lastReward: null,
    plan: [],
    planTimeout: false,
    returns: [],
    droppedFeedback: 0,
    rejectedFeedback: 0,
    lastFeedback: null,
    lastDisplayAt: null,
    maxepisode: 0,
  };
}

export function applyMessage(
  vm: ViewModel,
  message: ProtocolMessage,
  nowMs: number
): ViewModel {
  const next: ViewModel = { ...vm };
  if (vm.lastSeq >= 0 && message.seq !== vm.lastSeq + 1) {
    next.seqGap = true;
  }
  next.lastSeq = message.seq;

  switch (message.kind) {
    case "snapshot": {
      const p = message.payload as SnapshotPayload;
      next.layout = p.layout;
      next.actions = p.actions;
      next.status = p.status;
      next.pacing = p.pacing;
      next.intervalMs = p.interval_ms;
      next.windowS = p.window_s;
      next.episode = p.episode;
      next.returns = [...p.returns];
      next.droppedFeedback = p.dropped_feedback;
      next.rejectedFeedback = p.rejected_feedback;
      next.maxepisode = p.maxepisode;
      if (next.agent === null && p.layout.kind === "four_rooms" && p.layout.start) {
        next.agent = { row: p.layout.start[0], col: p.layout.start[1], onboard: false };
      }
      if (next.agent === null && p.layout.kind === "taxi" && p.layout.taxi_start) {
        next.agent = {
          row: p.layout.taxi_start[0],
          col: p.layout.taxi_start[1],
          onboard: false,
        };
      }
      break;
    }
    case "plan_update": {
      const p = message.payload as PlanUpdatePayload;
      next.episode = p.episode;
      next.plan = p.steps.map((s) => ({ t: s.t, action: s.action, done: false }));
      next.planTimeout = p.timeout;
      next.step = 0;
      next.episodeReturn = 0;
      next.terminal = false;
      const start =
        next.layout && p.steps.length > 0 ? parsePose(next.layout, p.steps[0].state) : null;
      if (start) next.agent = start;
      break;
    }
    case "state_update": {
      const p = message.payload as StateUpdatePayload;
      next.episode = p.episode;
      next.step = p.step;
      next.episodeReturn = p.episode_return;
      next.agent = parsePose(next.layout, p.state) ?? next.agent;
      next.terminal = p.terminal;
      next.lastReward = p.reward;
      next.lastDisplayAt = nowMs;
      // the first step+1 executed (non-skip) plan rows are now done
      let executedSeen = 0;
      next.plan = next.plan.map((row) => {
        if (row.action === null) return row;
        executedSeen += 1;
        return executedSeen <= p.step + 1 ? { ...row, done: true } : row;
      });
      break;
    }
    case "feedback": {
      const p = message.payload as FeedbackPayload;
      next.lastFeedback = { episode: p.episode, step: p.step, value: p.value };
      break;
    }
    case "control": {
      const p = message.payload as ControlPayload;
      next.status = p.status;
      next.pacing = p.pacing;
      next.intervalMs = p.interval_ms;
      next.droppedFeedback = p.dropped_feedback;
      next.rejectedFeedback = p.rejected_feedback;
      if (typeof p.episode_return === "number") {
        next.returns = [...next.returns, p.episode_return];
      }
      break;
    }
  }
  return next;
}

/**
 * Remaining fraction of the feedback-attribution window for the latest
 * displayed step; null when nothing is attributable.
 */
export function attributionRemaining(vm: ViewModel, nowMs: number): number | null {
  if (vm.lastDisplayAt === null) return null;
  const elapsed = (nowMs - vm.lastDisplayAt) / 1000;
  if (elapsed >= vm.windowS) return null;
  return 1 - elapsed / vm.windowS;
}
