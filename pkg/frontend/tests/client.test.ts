import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client";
import { Clock, MockServer, snapshotPayload } from "./helpers";

async function flush() {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

describe("session client", () => {
  it("shows a visible reconnect state and retries on unexpected close", async () => {
    const clock = new Clock();
    const server = new MockServer(clock);
    const scheduled: Array<() => void> = [];
    const client = new SessionClient("abc", {
      socketFactory: server.socketFactory,
      fetchFn: server.fetchFn,
      now: clock.now,
      setTimeoutFn: (fn) => {
        scheduled.push(fn);
        return 0;
      },
    });
    client.connect();
    await flush();
    expect(client.vm.connection).toBe("open");

    server.sockets[0].onclose?.();
    expect(client.vm.connection).toBe("reconnecting");
    expect(scheduled).toHaveLength(1);

    scheduled[0]();
    await flush();
    expect(server.sockets).toHaveLength(2);
    expect(client.vm.connection).toBe("open");
  });

  it("closes quietly once the session is done", async () => {
    const clock = new Clock();
    const server = new MockServer(clock);
    const client = new SessionClient("abc", {
      socketFactory: server.socketFactory,
      fetchFn: server.fetchFn,
      now: clock.now,
    });
    client.connect();
    await flush();
    server.push("snapshot", snapshotPayload({ status: "done" }));
    server.sockets[0].onclose?.();
    expect(client.vm.connection).toBe("closed");
    expect(server.sockets).toHaveLength(1);
  });

  it("folds paused rejections into the view model", async () => {
    const clock = new Clock();
    const server = new MockServer(clock);
    const client = new SessionClient("abc", {
      socketFactory: server.socketFactory,
      fetchFn: server.fetchFn,
      now: clock.now,
    });
    client.connect();
    await flush();
    server.paused = true;
    const ack = await client.submitFeedback(1);
    expect(ack).toEqual({ accepted: false, reason: "paused" });
    expect(client.vm.rejectedFeedback).toBe(1);
  });
});
