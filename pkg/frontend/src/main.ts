/**
 * Entry point: create or attach to a trainer session and wire the view,
 * client and keyboard together. Accepts ?session=<id> to attach to an
 * existing session; otherwise shows a small launch form.
 */

import { SessionClient, createSession } from "./client.js";
import { bindKeyboard } from "./keyboard.js";
import { createView } from "./render.js";

function attach(root: HTMLElement, sessionId: string, baseUrl: string): void {
  const client = new SessionClient(sessionId, { baseUrl });
  const view = createView(root, {
    onFeedback: (value) => void client.submitFeedback(value),
    onControl: (action, intervalMs) => void client.control(action, intervalMs),
  });
  let paused = false;
  bindKeyboard(window, {
    onFeedback: (value) => void client.submitFeedback(value),
    onPauseToggle: () => {
      paused = !paused;
      void client.control(paused ? "pause" : "resume");
    },
    onStep: () => void client.control("step"),
  });
  client.onChange((vm) => view.update(vm, Date.now()));
  // keep the attribution countdown moving between messages
  setInterval(() => view.update(client.vm, Date.now()), 100);
  client.connect();
}

function launchForm(root: HTMLElement, baseUrl: string): void {
  const form = document.createElement("form");
  form.className = "launch";
  form.innerHTML = `
    <label>env
      <select name="env">
        <option>four_rooms</option><option>taxi</option><option>grid3</option>
      </select>
    </label>
    <label>episodes <input name="maxepisode" type="number" value="200"></label>
    <label>seed <input name="seed" type="number" value="0"></label>
    <label>pacing
      <select name="pacing"><option>timed</option><option>ondemand</option></select>
    </label>
    <label>interval ms <input name="interval" type="number" value="400"></label>
    <button type="submit">start session</button>
  `;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void createSession(
      {
        env: String(data.get("env")),
        algorithm: "pacman",
        feedback: "live",
        maxepisode: Number(data.get("maxepisode")),
        seeds: [Number(data.get("seed"))],
        log_steps: false,
      },
      {
        baseUrl,
        pacing: String(data.get("pacing")),
        intervalMs: Number(data.get("interval")),
      }
    ).then((sessionId) => {
      form.remove();
      attach(root, sessionId, baseUrl);
      history.replaceState(null, "", `?session=${sessionId}`);
    });
  });
  root.appendChild(form);
}

export function start(root: HTMLElement): void {
  const params = new URLSearchParams(location.search);
  const baseUrl = params.get("base") ?? "";
  const sessionId = params.get("session");
  if (sessionId) {
    attach(root, sessionId, baseUrl);
  } else {
    launchForm(root, baseUrl);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start(document.getElementById("app") as HTMLElement);
}
