// Wire the session to the page: new-game controls, command box, hint toggle.

import { Complexity, fetchTransport, GameClient, MapId, Mode } from "./protocol.js";
import { Session } from "./session.js";
import { findElements, render } from "./ui.js";

function value(id: string): string {
  return (document.getElementById(id) as HTMLSelectElement | HTMLInputElement).value;
}

function main(): void {
  const client = new GameClient(fetchTransport(""));
  const session = new Session(client);
  const els = findElements(document);
  session.subscribe((view) => render(view, els));

  const startButton = document.getElementById("new-game") as HTMLButtonElement;
  startButton.addEventListener("click", () => {
    const seedText = value("seed").trim();
    const seed = seedText === "" ? undefined : Number(seedText);
    session
      .startGame(value("mode") as Mode, value("map") as MapId, value("complexity") as Complexity, seed)
      .catch((error) => {
        els.banner.textContent = `could not reach the game service: ${error}`;
        els.banner.style.display = "block";
      });
  });

  els.input.addEventListener("keydown", (event) => {
    if (event.key !== "Enter") {
      return;
    }
    const text = els.input.value;
    els.input.value = "";
    void session.submitCommand(text);
  });

  const hintToggle = document.getElementById("hint-toggle") as HTMLButtonElement;
  hintToggle.addEventListener("click", () => void session.toggleHints());
}

document.addEventListener("DOMContentLoaded", main);
