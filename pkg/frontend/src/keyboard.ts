/**
 * Keyboard shortcuts mirroring the buttons: + / - give feedback, space
 * toggles pause, n steps (ondemand pacing). Keys typed into form fields are
 * ignored.
 */

export interface KeyHandlers {
  onFeedback: (value: 1 | -1) => void;
  onPauseToggle: () => void;
  onStep: () => void;
}

export function bindKeyboard(
  target: { addEventListener: Window["addEventListener"]; removeEventListener: Window["removeEventListener"] },
  handlers: KeyHandlers
): () => void {
  const onKeyDown = (event: KeyboardEvent) => {
    const node = event.target as HTMLElement | null;
    if (node instanceof HTMLInputElement || node instanceof HTMLTextAreaElement) {
      return;
    }
    switch (event.key) {
      case "+":
      case "=":
        event.preventDefault();
        handlers.onFeedback(1);
        break;
      case "-":
      case "_":
        event.preventDefault();
        handlers.onFeedback(-1);
        break;
      case " ":
        event.preventDefault();
        handlers.onPauseToggle();
        break;
      case "n":
      case "N":
        event.preventDefault();
        handlers.onStep();
        break;
    }
  };
  target.addEventListener("keydown", onKeyDown as EventListener);
  return () => target.removeEventListener("keydown", onKeyDown as EventListener);
}
