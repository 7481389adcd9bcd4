"""HTTP session service speaking the play protocol (versioned JSON, protocol 1).

Endpoints:
    POST   /games            {mode, map, complexity, seed?}  -> new session
    POST   /games/{id}/command  {text}                       -> one turn
    GET    /games/{id}                                       -> observable state
    DELETE /games/{id}                                       -> drop session

Sessions live in memory for the process lifetime.  Each session owns one
game state behind its own lock, so concurrent clients cannot interleave
half-applied turns.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import engine
from .assembly import GameSpec
from .solver import generate_game
from .worldkb import WorldKB

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

COMPLEXITY = {"simple": 4, "complex": 8}


class ProtocolError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    game_id: str
    spec: GameSpec
    state: engine.GameState
    intro: str
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class GameService:
    """Protocol-level request handling, independent of HTTP plumbing."""

    kbs: dict[str, WorldKB]
    graph: object
    corpus_sets: set[frozenset[str]]
    model: object
    sessions: dict[str, Session] = field(default_factory=dict)
    sessions_lock: threading.Lock = field(default_factory=threading.Lock)
    seed_counter: int = 0

    def create_game(self, body: dict) -> dict:
        mode = body.get("mode", "markov")
        map_id = body.get("map", "1R")
        complexity = body.get("complexity", "simple")
        if mode not in ("markov", "ngram", "random"):
            raise ProtocolError(400, f"unknown mode {mode!r}")
        if map_id not in self.kbs:
            raise ProtocolError(400, f"unknown map {map_id!r}")
        if complexity not in COMPLEXITY:
            raise ProtocolError(400, f"unknown complexity {complexity!r}")
        seed = body.get("seed")
        if seed is None:
            with self.sessions_lock:
                seed = self.seed_counter
                self.seed_counter += 1
        if not isinstance(seed, int):
            raise ProtocolError(400, "seed must be an integer")
        spec = generate_game(
            mode,
            COMPLEXITY[complexity],
            seed,
            self.kbs[map_id],
            self.graph,
            corpus_sets=self.corpus_sets,
            model=self.model,
        )
        game_id = uuid.uuid4().hex
        session = Session(
            game_id=game_id,
            spec=spec,
            state=engine.new_game(spec),
            intro=engine.intro_text(spec),
        )
        with self.sessions_lock:
            self.sessions[game_id] = session
        logger.info("created game %s (%s/%s/%s seed=%s)", game_id, mode, map_id, complexity, seed)
        return {
            "protocol": PROTOCOL_VERSION,
            "game_id": game_id,
            "intro_text": session.intro,
            "score_max": spec.score_max,
        }

    def _session(self, game_id: str) -> Session:
        with self.sessions_lock:
            session = self.sessions.get(game_id)
        if session is None:
            raise ProtocolError(404, f"no such game {game_id!r}")
        return session

    def command(self, game_id: str, body: dict) -> dict:
        text = body.get("text")
        if not isinstance(text, str):
            raise ProtocolError(400, "body needs a string 'text' field")
        session = self._session(game_id)
        with session.lock:
            session.state, observation = engine.submit(session.state, text)
            return {
                "protocol": PROTOCOL_VERSION,
                "feedback": observation.feedback,
                "score": session.state.score,
                "done": session.state.done,
                "admissible": observation.admissible,
            }

    def observe(self, game_id: str) -> dict:
        session = self._session(game_id)
        with session.lock:
            state = session.state
            return {
                "protocol": PROTOCOL_VERSION,
                "game_id": game_id,
                "intro_text": session.intro,
                "recipe_card": session.intro.split("\n\nYou are in")[0],
                "room": state.player_room,
                "inventory": sorted(state.inventory),
                "score": state.score,
                "score_max": session.spec.score_max,
                "done": state.done,
                "turn": state.turn,
                "admissible_actions": engine.admissible_actions(state),
            }

    def delete(self, game_id: str) -> dict:
        with self.sessions_lock:
            if game_id not in self.sessions:
                raise ProtocolError(404, f"no such game {game_id!r}")
            del self.sessions[game_id]
        return {"protocol": PROTOCOL_VERSION, "deleted": game_id}


def _make_handler(service: GameService, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # route through logging, not stderr
            logger.debug("http: " + fmt, *args)

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b"{}"
            try:
                data = json.loads(raw or b"{}")
            except json.JSONDecodeError as exc:
                raise ProtocolError(400, f"invalid JSON body: {exc}") from exc
            if not isinstance(data, dict):
                raise ProtocolError(400, "body must be a JSON object")
            if "protocol" in data and data["protocol"] != PROTOCOL_VERSION:
                raise ProtocolError(400, f"unsupported protocol {data['protocol']!r}")
            return data

        def _route(self, method: str) -> None:
            try:
                parts = [p for p in self.path.split("?")[0].split("/") if p]
                if method == "POST" and parts == ["games"]:
                    self._send(200, service.create_game(self._body()))
                elif method == "POST" and len(parts) == 3 and parts[0] == "games" and parts[2] == "command":
                    self._send(200, service.command(parts[1], self._body()))
                elif method == "GET" and len(parts) == 2 and parts[0] == "games":
                    self._send(200, service.observe(parts[1]))
                elif method == "DELETE" and len(parts) == 2 and parts[0] == "games":
                    self._send(200, service.delete(parts[1]))
                elif method == "GET" and static_dir is not None:
                    self._static(parts)
                else:
                    raise ProtocolError(404, f"no route for {method} {self.path}")
            except ProtocolError as exc:
                self._send(exc.status, {"protocol": PROTOCOL_VERSION, "error": exc.message})
            except Exception as exc:  # keep the server alive; report the failure
                logger.exception("internal error handling %s %s", method, self.path)
                self._send(500, {"protocol": PROTOCOL_VERSION, "error": f"internal error: {exc}"})

        def _static(self, parts: list[str]) -> None:
            name = "/".join(parts) or "index.html"
            target = (static_dir / name).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                raise ProtocolError(404, f"no such file {name!r}")
            content_types = {
                ".html": "text/html",
                ".js": "text/javascript",
                ".css": "text/css",
                ".map": "application/json",
            }
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", content_types.get(target.suffix, "application/octet-stream"))
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):
            self._route("POST")

        def do_GET(self):
            self._route("GET")

        def do_DELETE(self):
            self._route("DELETE")

    return Handler


def create_server(
    service: GameService, port: int = 8000, static_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    """Bind the service to a port (0 picks a free one); caller runs serve_forever."""
    static = Path(static_dir) if static_dir else None
    return ThreadingHTTPServer(("127.0.0.1", port), _make_handler(service, static))
