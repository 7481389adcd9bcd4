"""Declarative world knowledge: maps, object placement rules, affordances.

Everything here is data, loaded from hand-editable ``.kb`` files so the
world rules stay auditable.  File format: a ``kb-version: 1`` header, one
``[section]`` per knowledge type, and ``key: a | b | c`` entries.  Entries
carry an optional trailing ``| inferred`` marker for rules that fill gaps
rather than restate a sourced rule.  ``#`` starts a comment.

Example::

    kb-version: 1
    [objects]
    container: refrigerator | kitchen | closed
    placement: vegetable | refrigerator
    tool: knife | drawer
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

KB_VERSION = 1

CATEGORIES = ("vegetable", "fruit", "meat", "dairy", "grain/pantry", "liquid", "other")
FALLBACK_CATEGORY = "other"

#: preparation verbs the play engine understands; affordances must use these
PREP_ACTIONS = ("peel", "cut", "cook")

DOOR_STATES = ("none", "open", "closed")
CONTAINER_KINDS = ("closed", "bin", "surface")

MAP_IDS = ("1R", "5R")
MAP_ROOMS = {
    "1R": frozenset({"kitchen"}),
    "5R": frozenset({"kitchen", "dining room", "garage", "backyard", "garden"}),
}


class KBError(Exception):
    """A knowledge-base file failed to parse or cross-validate."""


@dataclass(frozen=True)
class MapSpec:
    id: str
    rooms: tuple[str, ...]
    connections: tuple[tuple[str, str, str], ...]  # (room, room, door state)

    def adjacent(self, room: str) -> list[str]:
        out = []
        for a, b, _ in self.connections:
            if a == room:
                out.append(b)
            elif b == room:
                out.append(a)
        return sorted(out)

    def door_state(self, a: str, b: str) -> str | None:
        for x, y, state in self.connections:
            if {x, y} == {a, b}:
                return state
        return None


@dataclass(frozen=True)
class Container:
    """A container or surface; ``closed`` kind means openable, starts shut."""

    name: str
    room: str
    kind: str  # closed | bin | surface
    inferred: bool = False

    @property
    def openable(self) -> bool:
        return self.kind == "closed"

    @property
    def preposition(self) -> str:
        return "on" if self.kind == "surface" else "in"


@dataclass(frozen=True)
class ObjectGraph:
    containers: tuple[Container, ...]
    category_placements: dict[str, tuple[str, ...]]
    tool_placements: dict[str, str]

    def container(self, name: str) -> Container:
        for c in self.containers:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class ActionGraph:
    affordances: dict[str, tuple[str, ...]]
    tool_requirements: dict[str, str | None]
    prohibitions: frozenset[tuple[str, str]]  # (category, action)


@dataclass(frozen=True)
class WorldKB:
    map: MapSpec
    objects: ObjectGraph
    actions: ActionGraph
    lexicon: dict[str, str]

    def category_of(self, ingredient: str) -> str:
        return self.lexicon.get(ingredient, FALLBACK_CATEGORY)

    def container(self, name: str) -> Container:
        return self.objects.container(name)


# --- file parsing ----------------------------------------------------------


def _read_kb_lines(path: str | Path) -> list[tuple[int, str, list[str], bool]]:
    """Yield (lineno, key, fields, inferred) entries after header validation."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    stripped = [(n + 1, ln.split("#", 1)[0].rstrip()) for n, ln in enumerate(lines)]
    stripped = [(n, ln) for n, ln in stripped if ln.strip()]
    if not stripped or stripped[0][1].strip() != f"kb-version: {KB_VERSION}":
        raise KBError(f"{path}: first line must be 'kb-version: {KB_VERSION}'")
    entries = []
    for lineno, line in stripped[1:]:
        line = line.strip()
        if line.startswith("[") and line.endswith("]"):
            entries.append((lineno, "[section]", [line[1:-1]], False))
            continue
        if ":" not in line:
            raise KBError(f"{path}:{lineno}: expected 'key: fields' but got {line!r}")
        key, rest = line.split(":", 1)
        fields = [f.strip() for f in rest.split("|")]
        inferred = False
        if fields and fields[-1] == "inferred":
            inferred = True
            fields = fields[:-1]
        entries.append((lineno, key.strip(), fields, inferred))
    return entries


def load_map(path: str | Path) -> MapSpec:
    map_id = None
    rooms: list[str] = []
    connections: list[tuple[str, str, str]] = []
    for lineno, key, fields, _ in _read_kb_lines(path):
        if key == "[section]":
            if fields[0] != "map":
                raise KBError(f"{path}:{lineno}: unexpected section [{fields[0]}] in a map file")
        elif key == "id":
            map_id = fields[0]
        elif key == "room":
            rooms.append(fields[0])
        elif key == "connection":
            if len(fields) != 3:
                raise KBError(f"{path}:{lineno}: connection needs 'room | room | door-state'")
            connections.append((fields[0], fields[1], fields[2]))
        else:
            raise KBError(f"{path}:{lineno}: unknown map entry {key!r}")
    if map_id is None or not rooms:
        raise KBError(f"{path}: map file needs an id and at least one room")
    spec = MapSpec(id=map_id, rooms=tuple(rooms), connections=tuple(connections))
    _validate_map(spec, str(path))
    return spec


def _validate_map(spec: MapSpec, origin: str) -> None:
    if spec.id not in MAP_IDS:
        raise KBError(f"{origin}: map id must be one of {MAP_IDS}, got {spec.id!r}")
    if len(set(spec.rooms)) != len(spec.rooms):
        raise KBError(f"{origin}: duplicate room names")
    if set(spec.rooms) != MAP_ROOMS[spec.id]:
        raise KBError(
            f"{origin}: {spec.id} must have rooms {sorted(MAP_ROOMS[spec.id])}, "
            f"got {sorted(spec.rooms)}"
        )
    for a, b, state in spec.connections:
        for room in (a, b):
            if room not in spec.rooms:
                raise KBError(f"{origin}: connection references unknown room {room!r}")
        if state not in DOOR_STATES:
            raise KBError(f"{origin}: bad door state {state!r}")
        if a == b:
            raise KBError(f"{origin}: connection from {a!r} to itself")
    # reachability sweep
    seen = {spec.rooms[0]}
    frontier = [spec.rooms[0]]
    while frontier:
        room = frontier.pop()
        for nbr in spec.adjacent(room):
            if nbr not in seen:
                seen.add(nbr)
                frontier.append(nbr)
    if seen != set(spec.rooms):
        raise KBError(f"{origin}: rooms {sorted(set(spec.rooms) - seen)} are unreachable")


def load_objects(path: str | Path, map_spec: MapSpec) -> ObjectGraph:
    containers: list[Container] = []
    placements: dict[str, tuple[str, ...]] = {}
    tools: dict[str, str] = {}
    for lineno, key, fields, inferred in _read_kb_lines(path):
        if key == "[section]":
            if fields[0] != "objects":
                raise KBError(f"{path}:{lineno}: unexpected section [{fields[0]}] in an objects file")
        elif key == "container":
            if len(fields) != 3 or fields[2] not in CONTAINER_KINDS:
                raise KBError(
                    f"{path}:{lineno}: container needs 'name | room | {'/'.join(CONTAINER_KINDS)}'"
                )
            containers.append(Container(fields[0], fields[1], fields[2], inferred))
        elif key == "placement":
            if len(fields) < 2:
                raise KBError(f"{path}:{lineno}: placement needs 'category | target[, target...]'")
            targets = tuple(t.strip() for t in ",".join(fields[1:]).split(",") if t.strip())
            placements[fields[0]] = targets
        elif key == "tool":
            if len(fields) != 2:
                raise KBError(f"{path}:{lineno}: tool needs 'tool | container'")
            tools[fields[0]] = fields[1]
        else:
            raise KBError(f"{path}:{lineno}: unknown objects entry {key!r}")
    graph = ObjectGraph(tuple(containers), placements, tools)
    _validate_objects(graph, map_spec, str(path))
    return graph


def _validate_objects(objects: ObjectGraph, map_spec: MapSpec, origin: str) -> None:
    names = [c.name for c in objects.containers]
    if len(set(names)) != len(names):
        raise KBError(f"{origin}: duplicate container names")
    for c in objects.containers:
        if c.room not in map_spec.rooms:
            raise KBError(f"{origin}: container {c.name!r} placed in unknown room {c.room!r}")
    for category, targets in objects.category_placements.items():
        if category not in CATEGORIES:
            raise KBError(f"{origin}: placement for unknown category {category!r}")
        if not targets:
            raise KBError(f"{origin}: category {category!r} has an empty placement list")
        for target in targets:
            if target not in names:
                raise KBError(
                    f"{origin}: placement target {target!r} for {category!r} is not a known container"
                )
        if map_spec.id == "1R" and len(targets) != 1:
            raise KBError(
                f"{origin}: 1R placements must be deterministic; {category!r} lists {len(targets)}"
            )
    missing = [cat for cat in CATEGORIES if cat not in objects.category_placements]
    if missing:
        raise KBError(f"{origin}: categories without placement rules: {missing}")
    for tool, target in objects.tool_placements.items():
        if target not in names:
            raise KBError(f"{origin}: tool {tool!r} placed in unknown container {target!r}")


def load_actions(path: str | Path) -> ActionGraph:
    affordances: dict[str, tuple[str, ...]] = {}
    requirements: dict[str, str | None] = {}
    prohibitions: set[tuple[str, str]] = set()
    for lineno, key, fields, _ in _read_kb_lines(path):
        if key == "[section]":
            if fields[0] != "actions":
                raise KBError(f"{path}:{lineno}: unexpected section [{fields[0]}] in an actions file")
        elif key == "affordance":
            if len(fields) < 2:
                raise KBError(f"{path}:{lineno}: affordance needs 'category | action[, action...]'")
            actions = tuple(a.strip() for a in ",".join(fields[1:]).split(",") if a.strip())
            affordances[fields[0]] = actions
        elif key == "requires":
            if len(fields) != 2:
                raise KBError(f"{path}:{lineno}: requires needs 'action | tool-or-none'")
            requirements[fields[0]] = None if fields[1] == "none" else fields[1]
        elif key == "prohibition":
            if len(fields) != 2:
                raise KBError(f"{path}:{lineno}: prohibition needs 'category | action'")
            prohibitions.add((fields[0], fields[1]))
        else:
            raise KBError(f"{path}:{lineno}: unknown actions entry {key!r}")
    graph = ActionGraph(affordances, requirements, frozenset(prohibitions))
    _validate_actions(graph, str(path))
    return graph


def _validate_actions(actions: ActionGraph, origin: str) -> None:
    for category, chain in actions.affordances.items():
        if category not in CATEGORIES:
            raise KBError(f"{origin}: affordance for unknown category {category!r}")
        for action in chain:
            if action not in PREP_ACTIONS:
                raise KBError(
                    f"{origin}: action {action!r} is not a known preparation action {PREP_ACTIONS}"
                )
    for action in actions.tool_requirements:
        if action not in PREP_ACTIONS:
            raise KBError(f"{origin}: tool requirement for unknown action {action!r}")
    for category, action in actions.prohibitions:
        if category not in CATEGORIES or action not in PREP_ACTIONS:
            raise KBError(f"{origin}: bad prohibition ({category!r}, {action!r})")


def load_lexicon(path: str | Path) -> dict[str, str]:
    lexicon: dict[str, str] = {}
    for lineno, key, fields, _ in _read_kb_lines(path):
        if key == "[section]":
            if fields[0] != "lexicon":
                raise KBError(f"{path}:{lineno}: unexpected section [{fields[0]}] in a lexicon file")
        elif key == "ingredient":
            if len(fields) != 2:
                raise KBError(f"{path}:{lineno}: ingredient needs 'name | category'")
            if fields[1] not in CATEGORIES:
                raise KBError(f"{path}:{lineno}: unknown category {fields[1]!r}")
            lexicon[fields[0]] = fields[1]
        else:
            raise KBError(f"{path}:{lineno}: unknown lexicon entry {key!r}")
    return lexicon


def load_kb(
    map_file: str | Path,
    object_file: str | Path,
    action_file: str | Path,
    lexicon_file: str | Path,
) -> WorldKB:
    """Load and cross-validate the four knowledge files into one WorldKB.

    Validation guarantees, among the per-file checks: every action that any
    category's affordance chain can demand has its tool placed somewhere in
    this world (tool closure), so grounded quests can always be completed.
    """
    map_spec = load_map(map_file)
    objects = load_objects(object_file, map_spec)
    actions = load_actions(action_file)
    lexicon = load_lexicon(lexicon_file)

    for category in CATEGORIES:
        for action, tool in _category_chain(category, actions):
            if tool is None:
                continue
            if tool not in objects.tool_placements:
                raise KBError(
                    f"action {action!r} (category {category!r}) requires tool {tool!r} "
                    f"but no placement puts that tool anywhere"
                )
    return WorldKB(map=map_spec, objects=objects, actions=actions, lexicon=lexicon)


def _category_chain(category: str, actions: ActionGraph) -> list[tuple[str, str | None]]:
    chain = [
        (action, actions.tool_requirements.get(action))
        for action in actions.affordances.get(category, ())
        if (category, action) not in actions.prohibitions
    ]
    return chain if chain else [("take", None)]


def actions_for(ingredient: str, kb: WorldKB) -> list[tuple[str, str | None]]:
    """Preparation chain (action, required tool) for an ingredient's category.

    Prohibited actions are filtered out; categories with nothing to prepare
    get the minimal affordance of simply being taken.
    """
    return _category_chain(kb.category_of(ingredient), kb.actions)


def placement_for(ingredient: str, kb: WorldKB, rng: np.random.Generator) -> str:
    """Pick where an ingredient starts: deterministic on 1R, uniform on 5R."""
    options = kb.objects.category_placements[kb.category_of(ingredient)]
    if len(options) == 1:
        return options[0]
    return options[int(rng.integers(len(options)))]


# --- shipped knowledge -----------------------------------------------------


def data_dir() -> Path:
    """Directory holding the package's shipped KB and corpus data."""
    return Path(str(resources.files("cookquest") / "data"))


def default_kb(map_id: str, kb_dir: str | Path | None = None) -> WorldKB:
    """Load the shipped knowledge base for a map ("1R" or "5R")."""
    if map_id not in MAP_IDS:
        raise KBError(f"unknown map id {map_id!r}, expected one of {MAP_IDS}")
    base = Path(kb_dir) if kb_dir else data_dir() / "kb"
    suffix = map_id.lower()
    return load_kb(
        base / f"map_{suffix}.kb",
        base / f"objects_{suffix}.kb",
        base / "actions.kb",
        base / "lexicon.kb",
    )
