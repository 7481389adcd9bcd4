"""Automated planner proving every generated game can be finished.

Search runs over (room, inventory, open flags, completed steps) using the
engine's own admissible actions as the branching function, minus commands
that cannot shorten a plan (look/examine/inventory revisit the same state;
dropping never helps because carrying costs nothing).  The heuristic adds
the number of pending quest steps to an exact lower bound on the walking
still required (rooms are a tree on the shipped maps, so the minimal tour
through the rooms that still matter has a closed form), which keeps the
search near-linear in plan length while A* with an admissible heuristic
still guarantees the returned plan is shortest.

Every returned plan is replayed through the engine before being reported,
so a "solvable" report always means: these commands finish the game with
full score.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from heapq import heappop, heappush

from . import engine
from .assembly import CONDITION_RULES, GameCondition, GameSpec, assemble, condition_for
from .recipegen import (
    GenerationParams,
    NgramModel,
    Recipe,
    generate_markov,
    generate_random,
    make_rng,
    sample_ngram,
)
from .worldkb import WorldKB

DEFAULT_BUDGET = 200_000


class SolverError(Exception):
    pass


@dataclass
class SolveReport:
    solvable: bool
    plan: list[str] = field(default_factory=list)
    states_expanded: int = 0
    failure_reason: str = ""

    @property
    def plan_length(self) -> int:
        return len(self.plan)


def _state_key(state: engine.GameState):
    return (
        state.player_room,
        frozenset(state.inventory),
        frozenset(name for name, is_open in state.container_open.items() if is_open),
        frozenset(key for key, is_open in state.door_open.items() if is_open),
        frozenset(state.completed_steps),
    )


def _branch_commands(state: engine.GameState) -> list[str]:
    out = []
    for command in engine.admissible_actions(state):
        # observation commands revisit the same state; dropping only regresses
        if command in ("look", "inventory") or command.startswith(("examine ", "drop ")):
            continue
        out.append(command)
    return out


def _room_distances(spec: GameSpec) -> dict[tuple[str, str], int]:
    rooms = spec.map.rooms
    dist = {(a, b): (0 if a == b else len(rooms) + 1) for a in rooms for b in rooms}
    for room in rooms:
        frontier = [room]
        while frontier:
            here = frontier.pop(0)
            for nbr in spec.map.adjacent(here):
                if dist[(room, nbr)] > dist[(room, here)] + 1:
                    dist[(room, nbr)] = dist[(room, here)] + 1
                    frontier.append(nbr)
    return dist


def _is_tree(spec: GameSpec) -> bool:
    return len(spec.map.connections) == len(spec.map.rooms) - 1


def _make_heuristic(spec: GameSpec):
    """h(state) = pending steps + walking/door lower bound; admissible."""
    dist = _room_distances(spec)
    tree = _is_tree(spec)
    parent: dict[str, str | None] = {}
    if tree:
        parent["kitchen"] = None
        frontier = ["kitchen"]
        while frontier:
            here = frontier.pop()
            for nbr in spec.map.adjacent(here):
                if nbr not in parent:
                    parent[nbr] = here
                    frontier.append(nbr)

    def required_rooms(state: engine.GameState) -> set[str]:
        rooms = set()
        for quest_step in spec.quest:
            if quest_step.id in state.completed_steps:
                continue
            if quest_step.verb == "open":
                rooms.add(spec.container(quest_step.object).room)
            elif quest_step.verb == "take" and quest_step.object not in state.inventory:
                try:
                    kind, place = state.entity_location(quest_step.object)
                except KeyError:
                    continue  # object never placed; the step is simply uncompletable
                if kind == "container":
                    rooms.add(spec.container(place).room)
                elif kind == "floor":
                    rooms.add(place)
        if spec.goal_step not in state.completed_steps:
            rooms.add("kitchen")
        return rooms

    def heuristic(state: engine.GameState) -> int:
        pending = len(spec.quest) - len(state.completed_steps)
        if pending == 0:
            return 0
        rooms = required_rooms(state)
        if not rooms:
            return pending
        if not tree:
            worst = max(dist[(state.player_room, r)] + dist[(r, "kitchen")] for r in rooms)
            return pending + worst
        # minimal tree walk: start at player, visit every required room, end
        # in the kitchen = 2 * edges(steiner tree) - dist(player, kitchen),
        # plus one command per still-closed door on those edges
        edges: set[frozenset[str]] = set()
        for target in rooms | {state.player_room}:
            node = target
            while parent[node] is not None:
                edges.add(frozenset((node, parent[node])))
                node = parent[node]
        # trim edges not needed: keep only edges on paths between required nodes;
        # rooted at kitchen every root path is needed, so the set is already minimal
        walk = 2 * len(edges) - dist[(state.player_room, "kitchen")]
        doors = sum(
            1
            for edge in edges
            if edge in state.door_open and not state.door_open[edge]
        )
        return pending + walk + doors

    return heuristic


def solve(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> SolveReport:
    """Find a shortest command sequence that finishes the game.

    Returns solvable=False with a diagnostic reason when the search space is
    exhausted (naming missing tools when that's the cause) or the state
    budget runs out.
    """
    start = engine.new_game(spec)
    heuristic = _make_heuristic(spec)
    counter = 0
    frontier: list = []
    heappush(frontier, (heuristic(start), 0, counter, start, []))
    best_g: dict = {_state_key(start): 0}
    expanded = 0

    while frontier:
        f, neg_g, _, state, path = heappop(frontier)
        g = -neg_g
        if best_g.get(_state_key(state), g) < g:
            continue
        if state.done:
            _verify_plan(spec, path)
            return SolveReport(solvable=True, plan=path, states_expanded=expanded)
        expanded += 1
        if expanded > budget:
            return SolveReport(
                solvable=False,
                states_expanded=expanded,
                failure_reason=f"budget of {budget} states exhausted",
            )
        for command in _branch_commands(state):
            next_state, observation = engine.submit(state, command)
            if not observation.admissible:
                continue
            key = _state_key(next_state)
            next_g = g + 1
            if next_g < best_g.get(key, 1 << 30):
                best_g[key] = next_g
                counter += 1
                heappush(
                    frontier,
                    (next_g + heuristic(next_state), -next_g, counter, next_state, path + [command]),
                )

    return SolveReport(
        solvable=False,
        states_expanded=expanded,
        failure_reason=_diagnose(spec),
    )


def _verify_plan(spec: GameSpec, plan: list[str]) -> None:
    state = engine.new_game(spec)
    for command in plan:
        state, observation = engine.submit(state, command)
        if not observation.admissible:
            raise SolverError(f"plan replay rejected command {command!r}")
    if not state.done or state.score != spec.score_max:
        raise SolverError(
            f"plan replay finished with done={state.done} score={state.score}/{spec.score_max}"
        )


def _diagnose(spec: GameSpec) -> str:
    entity_names = {e.name for e in spec.entities}
    missing = sorted(
        {
            quest_step.tool
            for quest_step in spec.quest
            if quest_step.tool is not None and quest_step.tool not in entity_names
        }
    )
    if missing:
        return f"unsolvable: required tool(s) not placed: {', '.join(missing)}"
    missing_objects = sorted(
        {
            quest_step.object
            for quest_step in spec.quest
            if quest_step.verb in ("take",) and quest_step.object not in entity_names
        }
    )
    if missing_objects:
        return f"unsolvable: quest object(s) not placed: {', '.join(missing_objects)}"
    return "unsolvable: search space exhausted without reaching the goal"


# --- batch validation --------------------------------------------------------


@dataclass
class BatchSummary:
    condition: str
    map_id: str
    seeds: int
    solved: int
    plan_lengths: list[int] = field(default_factory=list)
    states_expanded: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def solve_rate(self) -> float:
        return self.solved / self.seeds if self.seeds else 0.0

    @property
    def mean_plan_length(self) -> float:
        return statistics.fmean(self.plan_lengths) if self.plan_lengths else 0.0

    @property
    def median_plan_length(self) -> float:
        return statistics.median(self.plan_lengths) if self.plan_lengths else 0.0

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "map": self.map_id,
            "seeds": self.seeds,
            "solve_rate": round(self.solve_rate, 4),
            "mean_plan_length": round(self.mean_plan_length, 2),
            "median_plan_length": self.median_plan_length,
            "states_expanded": self.states_expanded,
            "failures": [{"seed": s, "reason": r} for s, r in self.failures],
        }

    def pretty(self) -> str:
        return (
            f"{self.condition}-{self.map_id}: seeds={self.seeds} "
            f"solve_rate={self.solve_rate:.3f} mean_plan={self.mean_plan_length:.2f} "
            f"median_plan={self.median_plan_length:.1f}"
        )


def generate_game(
    mode: str,
    n_ingredients: int,
    seed: int,
    kb: WorldKB,
    graph,
    corpus_sets: set[frozenset[str]] | None = None,
    model: NgramModel | None = None,
    top_k: int = 5,
) -> GameSpec:
    """One game from generator inputs; a single seeded stream drives both
    the recipe walk and the placement draws, so (mode, seed) reproduces it."""
    params = GenerationParams(
        n_ingredients=n_ingredients, seed=seed, mode=mode, top_k=top_k
    )
    rng = make_rng(seed)
    if mode == "markov":
        if corpus_sets is None:
            raise ValueError("markov mode needs corpus_sets for the novelty check")
        recipe: Recipe = generate_markov(graph, corpus_sets, params, rng)
    elif mode == "ngram":
        if model is None:
            raise ValueError("ngram mode needs a trained model")
        recipe = sample_ngram(model, params, rng)
    elif mode == "random":
        recipe = generate_random(graph, params, rng)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    condition = GameCondition(condition_for(mode, n_ingredients), kb.map.id)
    return assemble(recipe, kb, condition, rng)


def validate_batch(
    condition: GameCondition,
    n_seeds: int,
    kb: WorldKB,
    graph=None,
    corpus_sets: set[frozenset[str]] | None = None,
    model: NgramModel | None = None,
    n_ingredients: int | None = None,
    hd_spec: GameSpec | None = None,
    base_seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> BatchSummary:
    """Generate and solve n_seeds games under one condition; aggregate results."""
    summary = BatchSummary(condition=condition.condition, map_id=condition.map_id, seeds=n_seeds, solved=0)
    for i in range(n_seeds):
        seed = base_seed + i
        if condition.condition == "HD":
            if hd_spec is None:
                raise ValueError("HD condition needs a hand-designed spec")
            spec = hd_spec
        else:
            mode, fixed_n = CONDITION_RULES[condition.condition]
            n = n_ingredients if fixed_n is None else fixed_n
            spec = generate_game(
                mode, n or 4, seed, kb, graph, corpus_sets=corpus_sets, model=model
            )
        report = solve(spec, budget=budget)
        summary.states_expanded += report.states_expanded
        if report.solvable:
            summary.solved += 1
            summary.plan_lengths.append(report.plan_length)
        else:
            summary.failures.append((seed, report.failure_reason))
    return summary
