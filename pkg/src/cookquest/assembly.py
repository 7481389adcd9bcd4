"""Grounding: turn a generated recipe into a fully specified, playable game.

A GameSpec is self-contained: map, containers, placed entities, and the
quest's partially ordered steps all travel in one versioned file, so the
play engine never needs the knowledge base.  Placement follows the object
graph except under the RA condition, which scatters ingredients uniformly
over every container and surface; tools always sit where the tool rules
put them so games stay completable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .card import GOAL_PHRASE, step_phrase, title_for
from .recipegen import Recipe
from .worldkb import Container, MapSpec, WorldKB, actions_for, placement_for

SPEC_VERSION = 1

CONDITIONS = ("HD", "RA", "MCS", "MCC", "LM")

#: generation mode and ingredient count behind each generated condition
CONDITION_RULES = {
    "RA": ("random", None),
    "MCS": ("markov", 4),
    "MCC": ("markov", 8),
    "LM": ("ngram", None),
}

GOAL_STEP_ID = "prepare meal"


class AssemblyError(Exception):
    pass


class SpecFormatError(Exception):
    """A game spec file failed version or schema validation."""


@dataclass(frozen=True)
class GameCondition:
    condition: str  # HD | RA | MCS | MCC | LM
    map_id: str  # 1R | 5R

    def __post_init__(self) -> None:
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.map_id not in ("1R", "5R"):
            raise ValueError(f"unknown map id {self.map_id!r}")

    @property
    def label(self) -> str:
        return f"{self.condition}-{self.map_id}"


def condition_for(mode: str, n_ingredients: int) -> str:
    """The experiment label a (mode, n) pair plays under."""
    if mode == "random":
        return "RA"
    if mode == "ngram":
        return "LM"
    if mode == "markov":
        return "MCS" if n_ingredients <= 4 else "MCC"
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class QuestStep:
    id: str
    verb: str
    object: str | None
    tool: str | None = None
    prerequisites: frozenset[str] = frozenset()

    @property
    def phrase(self) -> str:
        return step_phrase(self.verb, self.object)


@dataclass(frozen=True)
class PlacedEntity:
    name: str
    kind: str  # ingredient | tool | scenery
    location: str  # container name (inside=True) or room name (floor)
    inside: bool = True


@dataclass
class GameSpec:
    map: MapSpec
    containers: tuple[Container, ...]
    entities: tuple[PlacedEntity, ...]
    quest: tuple[QuestStep, ...]
    goal_step: str
    recipe: Recipe
    provenance: dict = field(default_factory=dict)

    @property
    def score_max(self) -> int:
        return len(self.quest)

    def step(self, step_id: str) -> QuestStep:
        for s in self.quest:
            if s.id == step_id:
                return s
        raise KeyError(step_id)

    def entity(self, name: str) -> PlacedEntity | None:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def container(self, name: str) -> Container | None:
        for c in self.containers:
            if c.name == name:
                return c
        return None


def assemble(
    recipe: Recipe,
    kb: WorldKB,
    condition: GameCondition,
    rng: np.random.Generator,
) -> GameSpec:
    """Place the recipe's ingredients and tools and derive the quest steps.

    Step chain per ingredient: open its container (when the container starts
    closed), take it, then its preparation actions in order, each gated on
    taking the required tool.  A final goal step depends on every chain, and
    gathering order across ingredients stays unconstrained.
    """
    if not recipe.ingredients:
        raise AssemblyError("cannot assemble a game from an empty recipe")
    names = [ing.name for ing in recipe.ingredients]
    if len(set(names)) != len(names):
        raise AssemblyError(f"recipe has duplicate ingredients: {names}")

    all_container_names = sorted(c.name for c in kb.objects.containers)
    steps: dict[str, QuestStep] = {}
    entities: list[PlacedEntity] = []
    open_steps: dict[str, str] = {}
    tool_take_steps: dict[str, str] = {}
    chain_tails: list[str] = []

    def ensure_open_step(container: Container) -> str | None:
        if not container.openable:
            return None
        step_id = f"open {container.name}"
        if step_id not in steps:
            steps[step_id] = QuestStep(id=step_id, verb="open", object=container.name)
            open_steps[container.name] = step_id
        return step_id

    def ensure_tool(tool: str) -> str:
        if tool in tool_take_steps:
            return tool_take_steps[tool]
        if tool in names:
            raise AssemblyError(f"name clash: {tool!r} is both an ingredient and a tool")
        container = kb.container(kb.objects.tool_placements[tool])
        entities.append(PlacedEntity(tool, "tool", container.name, inside=True))
        prereq = ensure_open_step(container)
        step_id = f"take {tool}"
        steps[step_id] = QuestStep(
            id=step_id,
            verb="take",
            object=tool,
            prerequisites=frozenset({prereq} if prereq else ()),
        )
        tool_take_steps[tool] = step_id
        return step_id

    for name in names:
        if condition.condition == "RA":
            location = all_container_names[int(rng.integers(len(all_container_names)))]
        else:
            location = placement_for(name, kb, rng)
        container = kb.container(location)
        entities.append(PlacedEntity(name, "ingredient", container.name, inside=True))

        prereq = ensure_open_step(container)
        take_id = f"take {name}"
        steps[take_id] = QuestStep(
            id=take_id,
            verb="take",
            object=name,
            prerequisites=frozenset({prereq} if prereq else ()),
        )
        previous = take_id
        for action, tool in actions_for(name, kb):
            if action == "take":
                continue  # gathering is already a step
            prereqs = {previous}
            tool_step = None
            if tool is not None:
                tool_step = ensure_tool(tool)
                prereqs.add(tool_step)
            step_id = f"{action} {name}"
            steps[step_id] = QuestStep(
                id=step_id,
                verb=action,
                object=name,
                tool=tool,
                prerequisites=frozenset(prereqs),
            )
            previous = step_id
        chain_tails.append(previous)

    steps[GOAL_STEP_ID] = QuestStep(
        id=GOAL_STEP_ID,
        verb="prepare meal",
        object=None,
        prerequisites=frozenset(chain_tails),
    )

    quest = tuple(steps.values())
    _check_quest(quest, GOAL_STEP_ID)

    prep_lines = [
        steps[f"{action} {name}"].phrase
        for name in names
        for action, _ in actions_for(name, kb)
        if action != "take"
    ]
    grounded = Recipe(
        ingredients=list(recipe.ingredients),
        title=recipe.title or title_for(names),
        steps=prep_lines + [GOAL_PHRASE],
        provenance=dict(recipe.provenance),
    )

    provenance = dict(recipe.provenance)
    provenance.update({"condition": condition.condition, "map": condition.map_id})
    return GameSpec(
        map=kb.map,
        containers=tuple(kb.objects.containers),
        entities=tuple(entities),
        quest=quest,
        goal_step=GOAL_STEP_ID,
        recipe=grounded,
        provenance=provenance,
    )


def _check_quest(quest: tuple[QuestStep, ...], goal_id: str) -> None:
    """Assert the prerequisite graph is acyclic and the goal covers every step."""
    by_id = {s.id: s for s in quest}
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(step_id: str) -> None:
        if state.get(step_id) == 2:
            return
        if state.get(step_id) == 1:
            raise AssemblyError(f"cyclic prerequisites involving {step_id!r}")
        state[step_id] = 1
        for dep in by_id[step_id].prerequisites:
            visit(dep)
        state[step_id] = 2
        order.append(step_id)

    for s in quest:
        visit(s.id)

    covered: set[str] = set()
    frontier = [goal_id]
    while frontier:
        sid = frontier.pop()
        if sid in covered:
            continue
        covered.add(sid)
        frontier.extend(by_id[sid].prerequisites)
    if covered != set(by_id):
        raise AssemblyError(f"goal does not depend on steps: {sorted(set(by_id) - covered)}")


def render_instructions(spec: GameSpec) -> tuple[str, list[str]]:
    """The recipe card: title plus one line per ingredient and per step."""
    lines = ["Ingredients:"]
    lines += [f"  {ing.name}" for ing in spec.recipe.ingredients]
    lines += ["", "Preparation:"]
    lines += [f"  {phrase}" for phrase in spec.recipe.steps]
    return spec.recipe.title, lines


def card_text(spec: GameSpec) -> str:
    title, lines = render_instructions(spec)
    return "\n".join([f"=== {title} ===", ""] + lines)


# --- serialization ----------------------------------------------------------


def spec_to_dict(spec: GameSpec) -> dict:
    return {
        "spec-version": SPEC_VERSION,
        "map": {
            "id": spec.map.id,
            "rooms": list(spec.map.rooms),
            "connections": [list(c) for c in spec.map.connections],
        },
        "containers": [
            {"name": c.name, "room": c.room, "kind": c.kind} for c in spec.containers
        ],
        "entities": [
            {"name": e.name, "kind": e.kind, "location": e.location, "inside": e.inside}
            for e in spec.entities
        ],
        "quest": [
            {
                "id": s.id,
                "verb": s.verb,
                "object": s.object,
                "tool": s.tool,
                "requires": sorted(s.prerequisites),
            }
            for s in spec.quest
        ],
        "goal_step": spec.goal_step,
        "recipe": {
            "title": spec.recipe.title,
            "ingredients": [ing.name for ing in spec.recipe.ingredients],
            "steps": list(spec.recipe.steps),
        },
        "provenance": dict(sorted(spec.provenance.items())),
    }


def serialize_game(spec: GameSpec, path: str | Path) -> None:
    """Write a spec as versioned, field-ordered JSON (stable across runs)."""
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n", encoding="utf-8")


def spec_from_dict(data: dict, origin: str = "<spec>") -> GameSpec:
    from .corpus import CanonicalIngredient

    if data.get("spec-version") != SPEC_VERSION:
        raise SpecFormatError(
            f"{origin}: spec-version {data.get('spec-version')!r} is not {SPEC_VERSION}"
        )
    try:
        map_spec = MapSpec(
            id=data["map"]["id"],
            rooms=tuple(data["map"]["rooms"]),
            connections=tuple((a, b, s) for a, b, s in data["map"]["connections"]),
        )
        containers = tuple(
            Container(c["name"], c["room"], c["kind"]) for c in data["containers"]
        )
        entities = tuple(
            PlacedEntity(e["name"], e["kind"], e["location"], e["inside"])
            for e in data["entities"]
        )
        quest = tuple(
            QuestStep(
                id=s["id"],
                verb=s["verb"],
                object=s["object"],
                tool=s.get("tool"),
                prerequisites=frozenset(s["requires"]),
            )
            for s in data["quest"]
        )
        recipe = Recipe(
            ingredients=[CanonicalIngredient.of(n) for n in data["recipe"]["ingredients"]],
            title=data["recipe"]["title"],
            steps=list(data["recipe"]["steps"]),
            provenance=dict(data.get("provenance", {})),
        )
        spec = GameSpec(
            map=map_spec,
            containers=containers,
            entities=entities,
            quest=quest,
            goal_step=data["goal_step"],
            recipe=recipe,
            provenance=dict(data.get("provenance", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"{origin}: malformed game spec: {exc!r}") from exc
    _validate_spec(spec, origin)
    return spec


def _validate_spec(spec: GameSpec, origin: str) -> None:
    rooms = set(spec.map.rooms)
    container_names = {c.name for c in spec.containers}
    entity_names = {e.name for e in spec.entities}
    if len(entity_names) != len(spec.entities):
        raise SpecFormatError(f"{origin}: duplicate entity names")
    for c in spec.containers:
        if c.room not in rooms:
            raise SpecFormatError(f"{origin}: container {c.name!r} in unknown room {c.room!r}")
    for e in spec.entities:
        if e.inside and e.location not in container_names:
            raise SpecFormatError(
                f"{origin}: entity {e.name!r} placed in unknown container {e.location!r}"
            )
        if not e.inside and e.location not in rooms:
            raise SpecFormatError(f"{origin}: entity {e.name!r} in unknown room {e.location!r}")
    step_ids = {s.id for s in spec.quest}
    if spec.goal_step not in step_ids:
        raise SpecFormatError(f"{origin}: goal step {spec.goal_step!r} is not a quest step")
    for s in spec.quest:
        if s.verb == "open":
            if s.object not in container_names:
                raise SpecFormatError(
                    f"{origin}: step {s.id!r} opens unknown container {s.object!r}"
                )
        elif s.object is not None and s.object not in entity_names:
            raise SpecFormatError(f"{origin}: step {s.id!r} references unknown entity {s.object!r}")
        if s.tool is not None and s.tool not in entity_names:
            raise SpecFormatError(f"{origin}: step {s.id!r} requires unplaced tool {s.tool!r}")
        for dep in s.prerequisites:
            if dep not in step_ids:
                raise SpecFormatError(f"{origin}: step {s.id!r} requires unknown step {dep!r}")
    try:
        _check_quest(spec.quest, spec.goal_step)
    except AssemblyError as exc:
        raise SpecFormatError(f"{origin}: {exc}") from exc


def deserialize_game(path: str | Path) -> GameSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFormatError(f"{path}: cannot read game spec: {exc}") from exc
    return spec_from_dict(data, origin=str(path))
