/**
 * DOM view: grid with agent and markers, plan strip (skipped timestamps
 * dimmed), return sparkline, attribution countdown, feedback and session
 * controls. Rendering is a function of the view model; the only outbound
 * messages originate from button/key gestures wired to the callbacks.
 */

import { Layout } from "./protocol.js";
import { PlanRow, ViewModel, attributionRemaining } from "./viewModel.js";

export interface ViewCallbacks {
  onFeedback: (value: 1 | -1) => void;
  onControl: (
    action: "pause" | "resume" | "speed" | "step" | "stop",
    intervalMs?: number
  ) => void;
}

export interface View {
  update(vm: ViewModel, nowMs: number): void;
  root: HTMLElement;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function cellClass(layout: Layout, row: number, col: number): string {
  const has = (cells?: [number, number][]) =>
    cells?.some(([r, c]) => r === row && c === col) ?? false;
  if (has(layout.walls)) return "cell wall";
  if (has(layout.danger)) return "cell danger";
  if (layout.goal && layout.goal[0] === row && layout.goal[1] === col) {
    return "cell goal";
  }
  for (const [name, pos] of Object.entries(layout.landmarks ?? {})) {
    if (pos[0] === row && pos[1] === col) return `cell landmark landmark-${name}`;
  }
  return "cell";
}

export function createView(root: HTMLElement, callbacks: ViewCallbacks): View {
  const status = el("div", "status-line");
  const connection = el("div", "connection");
  const grid = el("div", "grid");
  const planStrip = el("div", "plan-strip");
  const sparkWrap = el("div", "sparkline-wrap");
  const spark = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  spark.setAttribute("class", "sparkline");
  spark.setAttribute("viewBox", "0 0 100 24");
  const sparkLine = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  sparkLine.setAttribute("fill", "none");
  sparkLine.setAttribute("stroke", "currentColor");
  spark.appendChild(sparkLine);
  sparkWrap.appendChild(spark);

  const plus = el("button", "feedback plus", "+") as HTMLButtonElement;
  const minus = el("button", "feedback minus", "−") as HTMLButtonElement;
  plus.addEventListener("click", () => callbacks.onFeedback(1));
  minus.addEventListener("click", () => callbacks.onFeedback(-1));
  const countdown = el("div", "countdown");
  const countdownFill = el("div", "countdown-fill");
  countdown.appendChild(countdownFill);
  const feedbackBox = el("div", "feedback-box");
  feedbackBox.append(plus, minus, countdown);

  const pause = el("button", "ctl pause", "pause") as HTMLButtonElement;
  const resume = el("button", "ctl resume", "resume") as HTMLButtonElement;
  const step = el("button", "ctl step", "step") as HTMLButtonElement;
  const speed = el("input", "ctl speed") as HTMLInputElement;
  speed.type = "number";
  speed.value = "400";
  speed.min = "10";
  pause.addEventListener("click", () => callbacks.onControl("pause"));
  resume.addEventListener("click", () => callbacks.onControl("resume"));
  step.addEventListener("click", () => callbacks.onControl("step"));
  speed.addEventListener("change", () =>
    callbacks.onControl("speed", Number(speed.value))
  );
  const controls = el("div", "controls");
  controls.append(pause, resume, step, speed);

  root.append(connection, status, grid, planStrip, feedbackBox, controls, sparkWrap);

  let gridLayout: Layout | null = null;
  let agentNode: HTMLElement | null = null;

  function buildGrid(layout: Layout): void {
    grid.textContent = "";
    grid.style.setProperty("--cols", String(layout.width));
    for (let r = 0; r < layout.height; r++) {
      for (let c = 0; c < layout.width; c++) {
        const cell = el("div", cellClass(layout, r, c));
        cell.dataset.row = String(r);
        cell.dataset.col = String(c);
        grid.appendChild(cell);
      }
    }
    agentNode = el("div", "agent");
    gridLayout = layout;
  }

  function renderAgent(vm: ViewModel): void {
    if (!gridLayout || !vm.agent || !agentNode) return;
    agentNode.remove();
    const cell = grid.querySelector(
      `[data-row="${vm.agent.row}"][data-col="${vm.agent.col}"]`
    );
    if (cell) {
      agentNode.className = vm.agent.onboard ? "agent onboard" : "agent";
      cell.appendChild(agentNode);
    }
  }

  function renderPlan(plan: PlanRow[], timeout: boolean): void {
    planStrip.textContent = "";
    if (timeout) {
      planStrip.appendChild(el("span", "plan-timeout", "no plan (timeout)"));
      return;
    }
    for (const row of plan) {
      const label = row.action ?? "·";
      const cls = [
        "plan-step",
        row.action === null ? "skip" : "",
        row.done ? "done" : "",
      ]
        .filter(Boolean)
        .join(" ");
      const node = el("span", cls, label);
      node.dataset.t = String(row.t);
      planStrip.appendChild(node);
    }
  }

  function renderSparkline(returns: number[]): void {
    const window = returns.slice(-100);
    if (window.length < 2) {
      sparkLine.setAttribute("points", "");
      return;
    }
    const lo = Math.min(...window);
    const hi = Math.max(...window);
    const span = hi - lo || 1;
    const points = window
      .map((value, i) => {
        const x = (i / (window.length - 1)) * 100;
        const y = 22 - ((value - lo) / span) * 20;
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    sparkLine.setAttribute("points", points);
  }

  function update(vm: ViewModel, nowMs: number): void {
    connection.textContent =
      vm.connection === "open" ? "" : `connection: ${vm.connection}`;
    connection.className = `connection ${vm.connection}`;
    status.textContent =
      `${vm.status} | episode ${vm.episode}/${vm.maxepisode} step ${vm.step} ` +
      `return ${vm.episodeReturn.toFixed(1)} | dropped ${vm.droppedFeedback} ` +
      `rejected ${vm.rejectedFeedback}` +
      (vm.seqGap ? " | STREAM GAP" : "");
    if (vm.layout && vm.layout !== gridLayout) buildGrid(vm.layout);
    renderAgent(vm);
    renderPlan(vm.plan, vm.planTimeout);
    renderSparkline(vm.returns);
    const remaining = attributionRemaining(vm, nowMs);
    countdownFill.style.width = remaining === null ? "0%" : `${remaining * 100}%`;
    const running = vm.status === "running";
    plus.disabled = !running;
    minus.disabled = !running;
    step.disabled = vm.pacing !== "ondemand";
  }

  return { update, root };
}
