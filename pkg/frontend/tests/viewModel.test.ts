import { describe, expect, it } from "vitest";

import { ProtocolMessage } from "../src/protocol";
import {
  applyMessage,
  attributionRemaining,
  initialViewModel,
} from "../src/viewModel";
import { snapshotPayload } from "./helpers";

function msg(seq: number, kind: ProtocolMessage["kind"], payload: unknown) {
  return { v: 1, seq, kind, payload } as ProtocolMessage;
}

describe("view model", () => {
  it("places the agent from a state update", () => {
    let vm = initialViewModel();
    vm = applyMessage(vm, msg(0, "snapshot", snapshotPayload()), 0);
    vm = applyMessage(
      vm,
      msg(1, "state_update", {
        episode: 0,
        step: 0,
        state: "5,2",
        prev_state: "5,3",
        action: "left",
        reward: -1,
        terminal: false,
        episode_return: -1,
      }),
      10
    );
    expect(vm.agent).toEqual({ row: 5, col: 2, onboard: false });
    expect(vm.episodeReturn).toBe(-1);
    expect(vm.lastDisplayAt).toBe(10);
  });

  it("keeps skipped plan timestamps and marks executed steps done", () => {
    let vm = initialViewModel();
    vm = applyMessage(vm, msg(0, "snapshot", snapshotPayload()), 0);
    vm = applyMessage(
      vm,
      msg(1, "plan_update", {
        episode: 0,
        timeout: false,
        steps: [
          { t: 1, state: "5,2", action: "up" },
          { t: 2, state: "4,2", action: null },
          { t: 3, state: "4,2", action: "up" },
        ],
        terminal: "3,2",
      }),
      0
    );
    expect(vm.plan.map((row) => row.action)).toEqual(["up", null, "up"]);
    vm = applyMessage(
      vm,
      msg(2, "state_update", {
        episode: 0,
        step: 0,
        state: "4,2",
        prev_state: "5,2",
        action: "up",
        reward: -1,
        terminal: false,
        episode_return: -1,
      }),
      5
    );
    expect(vm.plan.map((row) => row.done)).toEqual([true, false, false]);
  });

  it("accumulates the learning curve from episode-end controls", () => {
    let vm = initialViewModel();
    vm = applyMessage(vm, msg(0, "snapshot", snapshotPayload()), 0);
    for (const [i, value] of [-7, -6.5].entries()) {
      vm = applyMessage(
        vm,
        msg(i + 1, "control", {
          status: "running",
          pacing: "ondemand",
          interval_ms: 400,
          episode: i,
          dropped_feedback: 0,
          rejected_feedback: 0,
          episode_return: value,
        }),
        0
      );
    }
    expect(vm.returns).toEqual([-7, -6.5]);
  });

  it("replays deterministically from a recorded message log", () => {
    const log: Array<[ProtocolMessage, number]> = [
      [msg(0, "snapshot", snapshotPayload()), 0],
      [
        msg(1, "plan_update", {
          episode: 0,
          timeout: false,
          steps: [{ t: 1, state: "5,2", action: "up" }],
          terminal: "4,2",
        }),
        3,
      ],
      [
        msg(2, "state_update", {
          episode: 0,
          step: 0,
          state: "4,2",
          prev_state: "5,2",
          action: "up",
          reward: -1,
          terminal: false,
          episode_return: -1,
        }),
        7,
      ],
      [
        msg(3, "feedback", { episode: 0, step: 0, value: 1, client_ts: null }),
        9,
      ],
    ];
    const replay = () =>
      log.reduce((vm, [m, now]) => applyMessage(vm, m, now), initialViewModel());
    expect(replay()).toEqual(replay());
    expect(replay().lastFeedback).toEqual({ episode: 0, step: 0, value: 1 });
  });

  it("flags sequence gaps", () => {
    let vm = initialViewModel();
    vm = applyMessage(vm, msg(0, "snapshot", snapshotPayload()), 0);
    vm = applyMessage(vm, msg(2, "control", snapshotPayload()), 0);
    expect(vm.seqGap).toBe(true);
  });

  it("tracks the attribution countdown", () => {
    let vm = initialViewModel();
    vm = applyMessage(vm, msg(0, "snapshot", snapshotPayload()), 0);
    vm = applyMessage(
      vm,
      msg(1, "state_update", {
        episode: 0,
        step: 0,
        state: "5,2",
        prev_state: "5,2",
        action: "up",
        reward: -1,
        terminal: false,
        episode_return: -1,
      }),
      1000
    );
    expect(attributionRemaining(vm, 1000)).toBeCloseTo(1.0);
    expect(attributionRemaining(vm, 1500)).toBeCloseTo(0.5);
    expect(attributionRemaining(vm, 2100)).toBeNull();
  });
});
