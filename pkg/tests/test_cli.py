"""CLI subcommands and the HTTP session protocol."""

import json
import threading
import urllib.request

import pytest

from cookquest import cli, corpus, recipegen, solver, worldkb
from cookquest.server import GameService, create_server

TOY = "tests/data/toy_corpus.json"


def run_cli(*argv):
    return cli.run([str(a) for a in argv])


class TestIngestStats:
    def test_ingest_then_stats(self, tmp_path, capsys):
        graph_path = tmp_path / "toy.graph"
        assert run_cli("ingest", "--corpus", TOY, "--out", graph_path) == 0
        assert run_cli("stats", "--graph", graph_path) == 0
        out = capsys.readouterr().out
        assert "nodes: 9" in out
        assert "edges: 16" in out
        assert "total ordered weight: 42" in out

    def test_ingest_missing_corpus_exits_one(self, tmp_path):
        assert run_cli("ingest", "--corpus", tmp_path / "nope.json", "--out", tmp_path / "g") == 1

    def test_bad_flags_exit_two(self):
        with pytest.raises(SystemExit) as err:
            run_cli("gen", "--mode", "quantum")
        assert err.value.code == 2


class TestGen:
    @pytest.mark.parametrize("mode", ["markov", "ngram", "random"])
    def test_byte_identical_reruns(self, mode, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert run_cli(
                "gen", "--mode", mode, "--map", "5R", "--complexity", "complex",
                "--seed", "7", "--out", path,
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_recipe_only_output(self, tmp_path):
        out = tmp_path / "recipe.json"
        assert run_cli("gen", "--mode", "markov", "--seed", "3", "--recipe-only", "--out", out) == 0
        data = json.loads(out.read_text())
        assert set(data) == {"title", "ingredients", "steps", "provenance"}
        assert len(data["ingredients"]) == 4
        assert data["steps"][-1] == "prepare the meal"

    def test_gen_then_solve_exits_zero(self, tmp_path):
        spec = tmp_path / "game.json"
        for seed in range(10):
            assert run_cli("gen", "--mode", "random", "--map", "5R", "--seed", seed, "--out", spec) == 0
            assert run_cli("solve", "--spec", spec) == 0


class TestSolveCommand:
    def test_carrot_fixture_plan_printed(self, carrot_spec, tmp_path, capsys):
        from cookquest.assembly import serialize_game

        path = tmp_path / "carrot.game.json"
        serialize_game(carrot_spec, path)
        assert run_cli("solve", "--spec", path) == 0
        out = capsys.readouterr().out
        assert "solvable in 7 steps" in out
        assert "prepare meal" in out

    def test_json_output(self, carrot_spec, tmp_path, capsys):
        from cookquest.assembly import serialize_game

        path = tmp_path / "carrot.game.json"
        serialize_game(carrot_spec, path)
        assert run_cli("solve", "--spec", path, "--json") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["solvable"] is True
        assert data["plan_length"] == 7


class TestValidateCommand:
    def test_small_batch(self, capsys):
        assert run_cli("validate", "--condition", "MCS", "--map", "1R", "--seeds", "5", "--json") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["solve_rate"] == 1.0


class TestPlay:
    def test_scripted_session_and_transcript(self, carrot_spec, tmp_path, capsys, monkeypatch):
        from cookquest.assembly import serialize_game

        path = tmp_path / "carrot.game.json"
        serialize_game(carrot_spec, path)
        script = iter([
            "open refrigerator", "take carrot", "take peeler", "peel carrot",
            "take knife", "cut carrot", "prepare meal",
        ])
        monkeypatch.setattr("builtins.input", lambda prompt="": next(script))
        transcript = tmp_path / "session.transcript"
        assert run_cli("play", "--spec", path, "--transcript", transcript) == 0
        out = capsys.readouterr().out
        assert "=== carrot dish ===" in out
        assert "Quest complete" in out
        text = transcript.read_text()
        assert text.startswith("> open refrigerator\nYou open the refrigerator")
        assert text.rstrip().endswith("You prepare the meal. The carrot dish is ready!")

    def test_transcript_replays_identically(self, carrot_spec, tmp_path, monkeypatch, capsys):
        from cookquest import engine
        from cookquest.assembly import serialize_game

        path = tmp_path / "carrot.game.json"
        serialize_game(carrot_spec, path)
        script = iter(["open refrigerator", "xyzzy", "take carrot", "quit"])
        monkeypatch.setattr("builtins.input", lambda prompt="": next(script))
        transcript = tmp_path / "session.transcript"
        assert run_cli("play", "--spec", path, "--transcript", transcript) == 0
        capsys.readouterr()

        # replay: feed the '>' lines back through a fresh engine, compare feedback
        lines = transcript.read_text().splitlines()
        state = engine.new_game(carrot_spec)
        replayed = []
        for line in lines:
            if line.startswith("> "):
                state, obs = engine.submit(state, line[2:])
                replayed.append(f"> {line[2:]}")
                replayed.extend(obs.feedback.splitlines())
        assert replayed == lines


@pytest.fixture(scope="module")
def service():
    rules = corpus.NormalizationRules.from_file(worldkb.data_dir() / "normalization_rules.json")
    recipes = corpus.parse_corpus(worldkb.data_dir() / "sample_corpus.json")
    graph = corpus.build_graph(recipes, rules)
    sets = corpus.corpus_ingredient_sets(recipes, rules)
    model = recipegen.train_ngram(recipes, rules, order=2)
    kbs = {map_id: worldkb.default_kb(map_id) for map_id in ("1R", "5R")}
    return GameService(kbs=kbs, graph=graph, corpus_sets=sets, model=model)


@pytest.fixture(scope="module")
def server_url(service):
    httpd = create_server(service, port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()


def request(method, url, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method)
    req.add_header("Content-Type", "application/json")
    try:
        with urllib.request.urlopen(req) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


class TestSessionProtocol:
    def test_create_and_observe(self, server_url):
        status, created = request("POST", f"{server_url}/games", {
            "protocol": 1, "mode": "markov", "map": "1R", "complexity": "simple", "seed": 11,
        })
        assert status == 200
        assert created["protocol"] == 1
        assert created["score_max"] > 0
        game_id = created["game_id"]

        status, observed = request("GET", f"{server_url}/games/{game_id}")
        assert status == 200
        assert observed["room"] == "kitchen"
        assert observed["score"] == 0
        assert observed["admissible_actions"]
        assert observed["recipe_card"].startswith("=== ")

    def test_replay_plan_to_completion(self, server_url, service):
        status, created = request("POST", f"{server_url}/games", {
            "protocol": 1, "mode": "markov", "map": "1R", "complexity": "simple", "seed": 11,
        })
        game_id = created["game_id"]
        spec = solver.generate_game(
            "markov", 4, 11, service.kbs["1R"], service.graph, corpus_sets=service.corpus_sets
        )
        report = solver.solve(spec)
        assert report.solvable
        last = None
        for command in report.plan:
            status, last = request("POST", f"{server_url}/games/{game_id}/command", {
                "protocol": 1, "text": command,
            })
            assert status == 200
            assert last["admissible"] is True
        assert last["done"] is True
        assert last["score"] == created["score_max"]

    def test_intro_matches_engine_intro(self, server_url, service):
        from cookquest import engine

        _, created = request("POST", f"{server_url}/games", {
            "protocol": 1, "mode": "ngram", "map": "5R", "complexity": "simple", "seed": 5,
        })
        spec = solver.generate_game(
            "ngram", 4, 5, service.kbs["5R"], service.graph, model=service.model
        )
        assert created["intro_text"] == engine.intro_text(spec)

    def test_inadmissible_command_reported(self, server_url):
        _, created = request("POST", f"{server_url}/games", {"protocol": 1, "seed": 1})
        _, result = request("POST", f"{server_url}/games/{created['game_id']}/command", {
            "protocol": 1, "text": "xyzzy",
        })
        assert result["admissible"] is False
        assert result["score"] == 0

    def test_unknown_game_404(self, server_url):
        status, body = request("GET", f"{server_url}/games/deadbeef")
        assert status == 404
        assert "error" in body

    def test_bad_protocol_version_400(self, server_url):
        status, body = request("POST", f"{server_url}/games", {"protocol": 99})
        assert status == 400

    def test_bad_mode_400(self, server_url):
        status, _ = request("POST", f"{server_url}/games", {"protocol": 1, "mode": "quantum"})
        assert status == 400

    def test_delete_session(self, server_url):
        _, created = request("POST", f"{server_url}/games", {"protocol": 1, "seed": 2})
        game_id = created["game_id"]
        status, _ = request("DELETE", f"{server_url}/games/{game_id}")
        assert status == 200
        status, _ = request("GET", f"{server_url}/games/{game_id}")
        assert status == 404
