// DOM rendering: transcript pane, recipe card, score, controls, error banner.

import { SessionView } from "./session.js";

export interface Elements {
  transcript: HTMLElement;
  card: HTMLElement;
  score: HTMLElement;
  banner: HTMLElement;
  input: HTMLInputElement;
  hints: HTMLElement;
  doneOverlay: HTMLElement;
}

export function findElements(root: Document): Elements {
  const get = (id: string) => {
    const el = root.getElementById(id);
    if (!el) {
      throw new Error(`missing element #${id}`);
    }
    return el;
  };
  return {
    transcript: get("transcript"),
    card: get("recipe-card"),
    score: get("score"),
    banner: get("error-banner"),
    input: get("command-input") as HTMLInputElement,
    hints: get("hints"),
    doneOverlay: get("done-overlay"),
  };
}

export function render(view: SessionView, els: Elements): void {
  els.card.textContent = view.recipeCard;
  els.score.textContent = `score ${view.score} / ${view.scoreMax}`;

  els.transcript.replaceChildren();
  const intro = document.createElement("pre");
  intro.className = "feedback intro";
  intro.textContent = view.introText;
  els.transcript.appendChild(intro);
  for (const turn of view.transcript) {
    const command = document.createElement("div");
    command.className = "command";
    command.textContent = `> ${turn.command}`;
    const feedback = document.createElement("pre");
    feedback.className = turn.admissible ? "feedback" : "feedback rejected";
    feedback.textContent = turn.feedback;
    els.transcript.append(command, feedback);
  }
  els.transcript.scrollTop = els.transcript.scrollHeight;

  els.banner.textContent = view.error ?? "";
  els.banner.style.display = view.error ? "block" : "none";

  els.hints.style.display = view.hintsVisible ? "block" : "none";
  if (view.hintsVisible) {
    els.hints.textContent = view.hints.length ? `try: ${view.hints.join(", ")}` : "";
  }

  els.doneOverlay.style.display = view.done ? "block" : "none";
  if (view.done) {
    els.doneOverlay.textContent = `Quest complete! Final score ${view.score}/${view.scoreMax}.`;
  }
  els.input.disabled = view.done || view.busy;
}
