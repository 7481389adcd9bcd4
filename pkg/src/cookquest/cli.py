"""Command-line entry point tying the pipeline together.

Subcommands: ingest, stats, gen, play, solve, validate, serve.  Every run
logs its effective configuration; all subcommands except serve are
deterministic given their flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import assembly, corpus, engine, recipegen, solver, worldkb
from .server import GameService, create_server

logger = logging.getLogger("cookquest")

COMPLEXITY = {"simple": 4, "complex": 8}


def _default_corpus() -> Path:
    return worldkb.data_dir() / "sample_corpus.json"


def _default_rules() -> Path:
    return worldkb.data_dir() / "normalization_rules.json"


def _load_inputs(args):
    rules = corpus.NormalizationRules.from_file(args.rules)
    recipes = corpus.parse_corpus(args.corpus, strict=getattr(args, "strict", False))
    graph = corpus.build_graph(recipes, rules)
    sets = corpus.corpus_ingredient_sets(recipes, rules)
    return rules, recipes, graph, sets


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", type=Path, default=_default_corpus(), help="recipe corpus JSON file")
    parser.add_argument("--rules", type=Path, default=_default_rules(), help="normalization rules JSON file")


def _log_config(args: argparse.Namespace) -> None:
    config = {k: str(v) for k, v in sorted(vars(args).items()) if k != "func"}
    logger.info("config: %s", json.dumps(config))


# --- subcommands ---------------------------------------------------------


def cmd_ingest(args) -> int:
    _, _, graph, _ = _load_inputs(args)
    graph.to_file(args.out)
    logger.info("wrote %s: %d nodes, %d edges", args.out, graph.node_count, graph.edge_count)
    return 0


def cmd_stats(args) -> int:
    graph = corpus.IngredientGraph.from_file(args.graph)
    edges = graph.edges()
    singletons = sum(1 for _, _, w in edges if w == 1)
    print(f"nodes: {graph.node_count}")
    print(f"edges: {graph.edge_count}")
    print(f"total ordered weight: {graph.total_ordered_weight}")
    if edges:
        print(f"pairs occurring once: {singletons} ({100.0 * singletons / len(edges):.1f}%)")
        print(f"top {min(args.top, len(edges))} pairs:")
        for a, b, w in sorted(edges, key=lambda e: (-e[2], e[0], e[1]))[: args.top]:
            print(f"  {a} + {b}: {w}")
    return 0


def cmd_gen(args) -> int:
    rules, recipes, graph, sets = _load_inputs(args)
    kb = worldkb.default_kb(args.map, args.kb)
    n = COMPLEXITY[args.complexity] if args.n is None else args.n
    model = recipegen.train_ngram(recipes, rules, order=args.order) if args.mode == "ngram" else None
    spec = solver.generate_game(
        args.mode, n, args.seed, kb, graph,
        corpus_sets=sets, model=model, top_k=args.top_k,
    )
    if args.recipe_only:
        payload = {
            "title": spec.recipe.title,
            "ingredients": spec.recipe.ingredient_names,
            "steps": spec.recipe.steps,
            "provenance": dict(sorted(spec.provenance.items())),
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        assembly.serialize_game(spec, args.out)
    logger.info("wrote %s (%s, %d ingredients, %d quest steps)",
                args.out, spec.provenance.get("condition"), len(spec.recipe.ingredients), spec.score_max)
    return 0


def cmd_play(args) -> int:
    spec = assembly.deserialize_game(args.spec)
    state = engine.new_game(spec)
    transcript = open(args.transcript, "w", encoding="utf-8") if args.transcript else None
    print(engine.intro_text(spec))
    print(f"[score 0/{spec.score_max}]")
    try:
        while True:
            try:
                text = input("> ")
            except EOFError:
                break
            if text.strip().lower() in ("quit", "exit"):
                break
            if text.strip().lower() == "hint" and args.hints:
                print("Try: " + ", ".join(engine.admissible_actions(state)))
                continue
            state, observation = engine.submit(state, text)
            print(observation.feedback)
            if transcript:
                transcript.write(f"> {text}\n{observation.feedback}\n")
            if observation.score_delta:
                print(f"[score {state.score}/{spec.score_max}]")
            if state.done:
                print("*** Quest complete! ***")
                break
    finally:
        if transcript:
            transcript.close()
    return 0


def cmd_solve(args) -> int:
    spec = assembly.deserialize_game(args.spec)
    report = solver.solve(spec, budget=args.budget)
    if args.json:
        print(json.dumps({
            "solvable": report.solvable,
            "plan": report.plan,
            "plan_length": report.plan_length,
            "states_expanded": report.states_expanded,
            "failure_reason": report.failure_reason,
        }, indent=2))
    elif report.solvable:
        print(f"solvable in {report.plan_length} steps ({report.states_expanded} states expanded):")
        for command in report.plan:
            print(f"  {command}")
    else:
        print(f"not solvable: {report.failure_reason}")
    return 0 if report.solvable else 1


def cmd_validate(args) -> int:
    rules, recipes, graph, sets = _load_inputs(args)
    kb = worldkb.default_kb(args.map, args.kb)
    model = recipegen.train_ngram(recipes, rules, order=args.order)
    hd_spec = None
    if args.condition == "HD":
        hd_spec = assembly.deserialize_game(worldkb.data_dir() / "games" / f"hd_{args.map.lower()}.game.json")
    summary = solver.validate_batch(
        assembly.GameCondition(args.condition, args.map),
        args.seeds, kb, graph,
        corpus_sets=sets, model=model,
        n_ingredients=args.n, hd_spec=hd_spec, base_seed=args.base_seed,
    )
    if args.json:
        print(json.dumps(summary.as_dict(), indent=2))
    else:
        print(summary.pretty())
        for seed, reason in summary.failures:
            print(f"  seed {seed}: {reason}")
    return 0 if summary.solve_rate == 1.0 else 1


def cmd_serve(args) -> int:
    rules, recipes, graph, sets = _load_inputs(args)
    model = recipegen.train_ngram(recipes, rules, order=args.order)
    kbs = {map_id: worldkb.default_kb(map_id, args.kb) for map_id in ("1R", "5R")}
    service = GameService(kbs=kbs, graph=graph, corpus_sets=sets, model=model)
    httpd = create_server(service, port=args.port, static_dir=args.static)
    logger.info("serving on http://127.0.0.1:%d", httpd.server_address[1])
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        logger.info("shutting down")
    return 0


# --- argument wiring ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cookquest",
        description="Generate, validate, play and serve procedurally generated cooking quests.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="build an ingredient graph file from a corpus")
    _add_corpus_flags(p)
    p.add_argument("--strict", action="store_true", help="abort on malformed corpus entries")
    p.add_argument("--out", type=Path, required=True, help="graph file to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="summarize a graph file")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--top", type=int, default=10, help="how many heaviest pairs to list")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="generate a recipe or a full game spec")
    _add_corpus_flags(p)
    p.add_argument("--mode", choices=recipegen.MODES, default="markov")
    p.add_argument("--map", choices=("1R", "5R"), default="1R")
    p.add_argument("--complexity", choices=tuple(COMPLEXITY), default="simple")
    p.add_argument("--n", type=int, default=None, help="ingredient count (overrides --complexity)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=5, help="top-k cutoff for ngram sampling")
    p.add_argument("--order", type=int, default=2, help="ngram model order")
    p.add_argument("--kb", type=Path, default=None, help="knowledge base directory")
    p.add_argument("--recipe-only", action="store_true", help="emit just the recipe card JSON")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("play", help="play a game spec interactively")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--transcript", type=Path, default=None, help="log '> command / feedback' turns")
    p.add_argument("--hints", action="store_true", help="enable the 'hint' command")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("solve", help="prove a game spec completable and print a plan")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--budget", type=int, default=solver.DEFAULT_BUDGET)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="batch-generate and solve games under a condition")
    _add_corpus_flags(p)
    p.add_argument("--condition", choices=assembly.CONDITIONS, default="MCS")
    p.add_argument("--map", choices=("1R", "5R"), default="1R")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--kb", type=Path, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP play service")
    _add_corpus_flags(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--kb", type=Path, default=None)
    p.add_argument("--static", type=Path, default=None, help="directory of web client files to serve")
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
    )
    _log_config(args)
    try:
        return args.func(args)
    except (
        corpus.CorpusError,
        corpus.NormalizationError,
        corpus.GraphFormatError,
        worldkb.KBError,
        assembly.AssemblyError,
        assembly.SpecFormatError,
        recipegen.GenerationError,
        solver.SolverError,
        OSError,
    ) as exc:
        logger.error("%s", exc)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
