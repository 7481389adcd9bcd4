// Session protocol (version 1) spoken by the cookquest service.
// The client is a pure consumer: it never computes rules or scores itself.

export const PROTOCOL_VERSION = 1;

export type Mode = "markov" | "ngram" | "random";
export type MapId = "1R" | "5R";
export type Complexity = "simple" | "complex";

export interface CreateGameRequest {
  protocol: number;
  mode: Mode;
  map: MapId;
  complexity: Complexity;
  seed?: number;
}

export interface CreateGameResponse {
  protocol: number;
  game_id: string;
  intro_text: string;
  score_max: number;
}

export interface CommandResponse {
  protocol: number;
  feedback: string;
  score: number;
  done: boolean;
  admissible: boolean;
}

export interface ObserveResponse {
  protocol: number;
  game_id: string;
  intro_text: string;
  recipe_card: string;
  room: string;
  inventory: string[];
  score: number;
  score_max: number;
  done: boolean;
  turn: number;
  admissible_actions: string[];
}

export interface ErrorResponse {
  protocol: number;
  error: string;
}

/** Transport seam: the real client uses fetch; tests replay recorded traffic. */
export interface Transport {
  request(method: string, path: string, body?: unknown): Promise<unknown>;
}

export class ProtocolError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export function fetchTransport(baseUrl: string): Transport {
  return {
    async request(method: string, path: string, body?: unknown): Promise<unknown> {
      const response = await fetch(baseUrl + path, {
        method,
        headers: { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
      const payload = (await response.json()) as Record<string, unknown>;
      if (!response.ok) {
        const message = typeof payload.error === "string" ? payload.error : response.statusText;
        throw new ProtocolError(response.status, message);
      }
      return payload;
    },
  };
}

export class GameClient {
  constructor(private readonly transport: Transport) {}

  async createGame(
    mode: Mode,
    map: MapId,
    complexity: Complexity,
    seed?: number,
  ): Promise<CreateGameResponse> {
    const body: CreateGameRequest = { protocol: PROTOCOL_VERSION, mode, map, complexity };
    if (seed !== undefined) {
      body.seed = seed;
    }
    return (await this.transport.request("POST", "/games", body)) as CreateGameResponse;
  }

  async sendCommand(gameId: string, text: string): Promise<CommandResponse> {
    return (await this.transport.request("POST", `/games/${gameId}/command`, {
      protocol: PROTOCOL_VERSION,
      text,
    })) as CommandResponse;
  }

  async observe(gameId: string): Promise<ObserveResponse> {
    return (await this.transport.request("GET", `/games/${gameId}`)) as ObserveResponse;
  }

  async deleteGame(gameId: string): Promise<void> {
    await this.transport.request("DELETE", `/games/${gameId}`);
  }
}
