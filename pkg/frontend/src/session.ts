// Session state behind the play surface: an append-only transcript plus
// whatever the server last said about score and completion.  All rules live
// server-side; this layer only mirrors responses and guards request order.

import { Complexity, GameClient, MapId, Mode } from "./protocol.js";

export interface Turn {
  command: string;
  feedback: string;
  admissible: boolean;
}

export interface SessionView {
  gameId: string;
  introText: string;
  recipeCard: string;
  transcript: readonly Turn[];
  score: number;
  scoreMax: number;
  done: boolean;
  hints: string[];
  hintsVisible: boolean;
  error: string | null;
  busy: boolean;
}

export type Listener = (view: SessionView) => void;

export class Session {
  private view: SessionView | null = null;
  private listeners: Listener[] = [];
  private pending = false;

  constructor(private readonly client: GameClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  current(): SessionView | null {
    return this.view;
  }

  private publish(): void {
    if (this.view) {
      const snapshot = this.view;
      for (const listener of this.listeners) {
        listener(snapshot);
      }
    }
  }

  async startGame(mode: Mode, map: MapId, complexity: Complexity, seed?: number): Promise<SessionView> {
    const created = await this.client.createGame(mode, map, complexity, seed);
    this.view = {
      gameId: created.game_id,
      introText: created.intro_text,
      recipeCard: created.intro_text.split("\n\nYou are in")[0] ?? created.intro_text,
      transcript: [],
      score: 0,
      scoreMax: created.score_max,
      done: false,
      hints: [],
      hintsVisible: false,
      error: null,
      busy: false,
    };
    this.publish();
    return this.view;
  }

  /** One turn; empty input sends nothing, requests are serialized per session. */
  async submitCommand(text: string): Promise<SessionView | null> {
    const trimmed = text.trim();
    if (!this.view || !trimmed || this.pending || this.view.done) {
      return this.view;
    }
    this.pending = true;
    this.view = { ...this.view, busy: true, error: null };
    this.publish();
    try {
      const result = await this.client.sendCommand(this.view.gameId, trimmed);
      const turn: Turn = {
        command: trimmed,
        feedback: result.feedback,
        admissible: result.admissible,
      };
      this.view = {
        ...this.view,
        transcript: [...this.view.transcript, turn],
        score: result.score,
        done: result.done,
        busy: false,
      };
      if (this.view.hintsVisible) {
        await this.refreshHints();
      }
    } catch (error) {
      // network failure: the turn is not appended and can be retried
      this.view = { ...this.view, busy: false, error: describe(error) };
    } finally {
      this.pending = false;
    }
    this.publish();
    return this.view;
  }

  async toggleHints(): Promise<void> {
    if (!this.view) {
      return;
    }
    this.view = { ...this.view, hintsVisible: !this.view.hintsVisible };
    if (this.view.hintsVisible) {
      await this.refreshHints();
    }
    this.publish();
  }

  private async refreshHints(): Promise<void> {
    if (!this.view) {
      return;
    }
    try {
      const observed = await this.client.observe(this.view.gameId);
      this.view = { ...this.view, hints: observed.admissible_actions };
    } catch (error) {
      this.view = { ...this.view, error: describe(error) };
    }
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
