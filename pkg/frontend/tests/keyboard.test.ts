import { describe, expect, it, vi } from "vitest";

import { bindKeyboard } from "../src/keyboard";

function press(key: string, target?: EventTarget) {
  const event = new KeyboardEvent("keydown", { key, bubbles: true, cancelable: true });
  (target ?? window).dispatchEvent(event);
}

describe("keyboard shortcuts", () => {
  it("mirrors the feedback buttons", () => {
    const onFeedback = vi.fn();
    const unbind = bindKeyboard(window, {
      onFeedback,
      onPauseToggle: vi.fn(),
      onStep: vi.fn(),
    });
    press("+");
    press("-");
    expect(onFeedback.mock.calls).toEqual([[1], [-1]]);
    unbind();
    press("+");
    expect(onFeedback).toHaveBeenCalledTimes(2);
  });

  it("space toggles pause and n steps", () => {
    const onPauseToggle = vi.fn();
    const onStep = vi.fn();
    const unbind = bindKeyboard(window, {
      onFeedback: vi.fn(),
      onPauseToggle,
      onStep,
    });
    press(" ");
    press("n");
    expect(onPauseToggle).toHaveBeenCalledTimes(1);
    expect(onStep).toHaveBeenCalledTimes(1);
    unbind();
  });

  it("ignores keys typed into form fields", () => {
    const onFeedback = vi.fn();
    const unbind = bindKeyboard(window, {
      onFeedback,
      onPauseToggle: vi.fn(),
      onStep: vi.fn(),
    });
    const input = document.createElement("input");
    document.body.appendChild(input);
    press("+", input);
    expect(onFeedback).not.toHaveBeenCalled();
    unbind();
    input.remove();
  });
});
