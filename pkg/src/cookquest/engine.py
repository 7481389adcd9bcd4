"""The interactive text-adventure engine that executes a GameSpec.

Commands come from a closed verb grammar; anything the engine cannot apply
turns into explanatory feedback with ``admissible=False`` and leaves the
state untouched, never an exception.  Feedback strings come from a single
template table so transcripts replay byte-for-byte.

Quest progress: whenever a command matches a pending quest step whose
prerequisites are all completed, the step completes and scores one point.
The game ends when the goal step completes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .assembly import GameSpec, card_text

VERBS = ("go", "open", "take", "drop", "examine", "inventory", "look", "peel", "cut", "cook", "prepare meal")

PREP_VERBS = ("peel", "cut", "cook")

VERB_ALIASES = {
    "get": "take",
    "grab": "take",
    "x": "examine",
    "i": "inventory",
    "inv": "inventory",
    "l": "look",
    "prepare": "prepare meal",
    "prepare meal": "prepare meal",
    "prepare the meal": "prepare meal",
}

NOUN_SYNONYMS = {
    "fridge": "refrigerator",
    "icebox": "refrigerator",
    "island": "kitchen island",
    "counter": "kitchen counter",
    "cupboard": "pantry",
    "pan": "frying pan",
    "old fridge": "old refrigerator",
}

ARTICLES = frozenset({"the", "a", "an", "to", "at", "into", "up"})

FEEDBACK = {
    ("open", "container"): "You open the {name}, revealing {contents}.",
    ("open", "container_empty"): "You open the {name}. It is empty.",
    ("open", "door"): "You open the {name}.",
    ("open", "already"): "The {name} is already open.",
    ("open", "not_openable"): "The {name} does not open.",
    ("go", "ok"): "{look}",
    ("go", "closed_door"): "The {door} is closed.",
    ("go", "not_adjacent"): "You can't get to the {name} from here.",
    ("go", "same_room"): "You are already in the {name}.",
    ("take", "ok"): "You take the {name}.",
    ("take", "carried"): "You already have the {name}.",
    ("take", "fixed"): "You can't take the {name}.",
    ("drop", "ok"): "You drop the {name}.",
    ("examine", "item"): "It's {article} {name}.",
    ("examine", "container"): "The {name} holds {contents}.",
    ("examine", "container_empty"): "The {name} is empty.",
    ("examine", "container_closed"): "The {name} is closed.",
    ("examine", "door"): "The {name} is {state}.",
    ("inventory", "some"): "You are carrying: {items}.",
    ("inventory", "none"): "You are empty-handed.",
    ("prep", "ok"): "You {verb} the {name}.",
    ("prep", "missing_tool"): "You need the {tool} to {verb} the {name}.",
    ("prep", "not_held"): "You aren't holding the {name}.",
    ("prep", "not_applicable"): "You can't {verb} the {name}.",
    ("prep", "not_ready"): "Not yet. First you need to {blocker}.",
    ("prep", "already"): "You have already {verb_past} the {name}.",
    ("goal", "ok"): "You prepare the meal. The {title} is ready!",
    ("goal", "not_ready"): "The meal isn't ready; the recipe card lists what still needs doing.",
    ("goal", "wrong_room"): "Meals are prepared in the kitchen.",
    ("done", "over"): "The game is over. The meal has been prepared.",
    ("parse", "unknown_verb"): "That's not a verb I recognise.",
    ("parse", "unknown_noun"): "You don't see any {name} here.",
    ("parse", "needs_object"): "What do you want to {verb}?",
    ("parse", "empty"): "Say something.",
}

PAST_TENSE = {"peel": "peeled", "cut": "cut", "cook": "cooked"}


class ParseError(Exception):
    """Command text the parser cannot resolve; message is player feedback."""


@dataclass(frozen=True)
class Command:
    verb: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Observation:
    feedback: str
    score_delta: int = 0
    admissible: bool = True


@dataclass
class GameState:
    spec: GameSpec
    player_room: str
    inventory: set[str] = field(default_factory=set)
    container_open: dict[str, bool] = field(default_factory=dict)
    door_open: dict[frozenset[str], bool] = field(default_factory=dict)
    dropped_at: dict[str, str] = field(default_factory=dict)
    completed_steps: set[str] = field(default_factory=set)
    score: int = 0
    done: bool = False
    turn: int = 0

    def copy(self) -> "GameState":
        return GameState(
            spec=self.spec,
            player_room=self.player_room,
            inventory=set(self.inventory),
            container_open=dict(self.container_open),
            door_open=dict(self.door_open),
            dropped_at=dict(self.dropped_at),
            completed_steps=set(self.completed_steps),
            score=self.score,
            done=self.done,
            turn=self.turn,
        )

    # --- world queries ---

    def entity_location(self, name: str) -> tuple[str, str]:
        """Where an entity is now: ("inventory"|"container"|"floor", place)."""
        if name in self.inventory:
            return ("inventory", "")
        if name in self.dropped_at:
            return ("floor", self.dropped_at[name])
        placed = self.spec.entity(name)
        if placed is None:
            raise KeyError(name)
        return ("container", placed.location) if placed.inside else ("floor", placed.location)

    def container_accessible(self, name: str) -> bool:
        container = self.spec.container(name)
        return container is not None and (not container.openable or self.container_open.get(name, False))

    def container_contents(self, name: str) -> list[str]:
        out = []
        for e in self.spec.entities:
            kind, place = self.entity_location(e.name)
            if kind == "container" and place == name:
                out.append(e.name)
        return sorted(out)

    def visible_entities(self) -> list[str]:
        """Entities the player can currently refer to (room + inventory)."""
        names = set(self.inventory)
        for e in self.spec.entities:
            kind, place = self.entity_location(e.name)
            if kind == "floor" and place == self.player_room:
                names.add(e.name)
            elif kind == "container" and place != "":
                container = self.spec.container(place)
                if container and container.room == self.player_room and self.container_accessible(place):
                    names.add(e.name)
        return sorted(names)

    def room_containers(self) -> list[str]:
        return sorted(c.name for c in self.spec.containers if c.room == self.player_room)

    def doors_here(self) -> dict[str, frozenset[str]]:
        """Door name -> connection key for doors adjacent to the player."""
        out = {}
        for a, b, state in self.spec.map.connections:
            if state == "none" or self.player_room not in (a, b):
                continue
            out[door_name(a, b)] = frozenset((a, b))
        return out


def door_name(a: str, b: str) -> str:
    """Canonical door name for a connection, the same from both sides."""
    far = b if a == "kitchen" else a if b == "kitchen" else max(a, b)
    return f"{far} door"


def new_game(spec: GameSpec) -> GameState:
    """Fresh state: player in the kitchen, closed things closed, score zero."""
    container_open = {c.name: False for c in spec.containers if c.openable}
    door_open = {
        frozenset((a, b)): (state == "open")
        for a, b, state in spec.map.connections
        if state != "none"
    }
    return GameState(
        spec=spec,
        player_room="kitchen",
        container_open=container_open,
        door_open=door_open,
    )


def intro_text(spec: GameSpec) -> str:
    state = new_game(spec)
    return card_text(spec) + "\n\n" + _look_text(state)


# --- parsing -----------------------------------------------------------------


def _normalize_noun(tokens: list[str]) -> str:
    words = [t for t in tokens if t not in ARTICLES]
    phrase = " ".join(words)
    return NOUN_SYNONYMS.get(phrase, phrase)


def parse(text: str, state: GameState) -> Command:
    """Resolve free text to a Command against what the player can see.

    Raises ParseError with player-facing feedback for unknown verbs, missing
    objects, and nouns that aren't visible right now.
    """
    tokens = text.strip().lower().split()
    if not tokens:
        raise ParseError(FEEDBACK[("parse", "empty")])

    whole = " ".join(tokens)
    if whole in VERB_ALIASES:
        return Command(VERB_ALIASES[whole])
    verb = VERB_ALIASES.get(tokens[0], tokens[0])
    if verb not in VERBS:
        raise ParseError(FEEDBACK[("parse", "unknown_verb")])
    rest = tokens[1:]

    if verb in ("look", "inventory", "prepare meal"):
        leftover = _normalize_noun(rest)
        if verb == "prepare meal" and leftover in ("", "meal"):
            return Command("prepare meal")
        if leftover:
            raise ParseError(FEEDBACK[("parse", "unknown_verb")])
        return Command(verb)

    noun = _normalize_noun(rest)
    if not noun:
        raise ParseError(FEEDBACK[("parse", "needs_object")].format(verb=verb))

    scope = _noun_scope(verb, state)
    if noun not in scope:
        raise ParseError(FEEDBACK[("parse", "unknown_noun")].format(name=noun))
    return Command(verb, (noun,))


def _noun_scope(verb: str, state: GameState) -> set[str]:
    doors = set(state.doors_here())
    containers = set(state.room_containers())
    visible = set(state.visible_entities())
    if verb == "go":
        return set(state.spec.map.rooms)
    if verb == "open":
        return containers | doors
    if verb == "take":
        return visible | containers  # resolving a container lets step() explain
    if verb == "drop":
        return set(state.inventory)
    if verb == "examine":
        return visible | containers | doors
    return visible  # preparation verbs


# --- stepping ----------------------------------------------------------------


def step(state: GameState, command: Command) -> tuple[GameState, Observation]:
    """Apply one parsed command; inadmissible commands leave state unchanged."""
    if state.done:
        return state, Observation(FEEDBACK[("done", "over")], 0, admissible=False)
    handler = {
        "go": _do_go,
        "open": _do_open,
        "take": _do_take,
        "drop": _do_drop,
        "examine": _do_examine,
        "inventory": _do_inventory,
        "look": _do_look,
        "peel": _do_prep,
        "cut": _do_prep,
        "cook": _do_prep,
        "prepare meal": _do_goal,
    }[command.verb]
    new_state, observation = handler(state, command)
    if observation.admissible:
        new_state.turn = state.turn + 1
    return new_state, observation


def submit(state: GameState, text: str) -> tuple[GameState, Observation]:
    """Parse and step in one call; parse failures become inadmissible feedback."""
    try:
        command = parse(text, state)
    except ParseError as exc:
        if state.done:
            return state, Observation(FEEDBACK[("done", "over")], 0, admissible=False)
        return state, Observation(str(exc), 0, admissible=False)
    return step(state, command)


def _reject(state: GameState, key: tuple[str, str], **kwargs) -> tuple[GameState, Observation]:
    return state, Observation(FEEDBACK[key].format(**kwargs), 0, admissible=False)


def _complete_step(state: GameState, step_id: str) -> int:
    """Mark a quest step done if it's pending with satisfied prerequisites."""
    try:
        quest_step = state.spec.step(step_id)
    except KeyError:
        return 0
    if step_id in state.completed_steps:
        return 0
    if not quest_step.prerequisites <= state.completed_steps:
        return 0
    state.completed_steps.add(step_id)
    state.score += 1
    return 1


def _look_text(state: GameState) -> str:
    lines = [f"You are in the {state.player_room}."]
    for name in state.room_containers():
        container = state.spec.container(name)
        if container.openable and not state.container_open.get(name, False):
            lines.append(f"There is a closed {name} here.")
            continue
        contents = state.container_contents(name)
        inside = ", ".join(contents) if contents else "nothing"
        preposition = "On" if container.kind == "surface" else "In"
        lines.append(f"{preposition} the {name}: {inside}.")
    floor = sorted(
        e.name for e in state.spec.entities if state.entity_location(e.name) == ("floor", state.player_room)
    )
    if floor:
        lines.append(f"On the floor: {', '.join(floor)}.")
    exits = []
    for room in state.spec.map.adjacent(state.player_room):
        door_state = state.spec.map.door_state(state.player_room, room)
        if door_state == "none":
            exits.append(room)
        else:
            is_open = state.door_open[frozenset((state.player_room, room))]
            exits.append(f"{room} ({door_name(state.player_room, room)} {'open' if is_open else 'closed'})")
    if exits:
        lines.append(f"Exits: {'; '.join(exits)}.")
    return "\n".join(lines)


def _do_look(state: GameState, command: Command) -> tuple[GameState, Observation]:
    new_state = state.copy()
    return new_state, Observation(_look_text(state))


def _do_inventory(state: GameState, command: Command) -> tuple[GameState, Observation]:
    new_state = state.copy()
    if not state.inventory:
        return new_state, Observation(FEEDBACK[("inventory", "none")])
    return new_state, Observation(
        FEEDBACK[("inventory", "some")].format(items=", ".join(sorted(state.inventory)))
    )


def _do_go(state: GameState, command: Command) -> tuple[GameState, Observation]:
    room = command.args[0]
    if room == state.player_room:
        return _reject(state, ("go", "same_room"), name=room)
    if room not in state.spec.map.adjacent(state.player_room):
        return _reject(state, ("go", "not_adjacent"), name=room)
    door_state = state.spec.map.door_state(state.player_room, room)
    if door_state != "none" and not state.door_open[frozenset((state.player_room, room))]:
        return _reject(state, ("go", "closed_door"), door=door_name(state.player_room, room))
    new_state = state.copy()
    new_state.player_room = room
    return new_state, Observation(FEEDBACK[("go", "ok")].format(look=_look_text(new_state)))


def _do_open(state: GameState, command: Command) -> tuple[GameState, Observation]:
    name = command.args[0]
    doors = state.doors_here()
    if name in doors:
        if state.door_open[doors[name]]:
            return _reject(state, ("open", "already"), name=name)
        new_state = state.copy()
        new_state.door_open[doors[name]] = True
        return new_state, Observation(FEEDBACK[("open", "door")].format(name=name))
    container = state.spec.container(name)
    if container is None or container.room != state.player_room:
        return _reject(state, ("parse", "unknown_noun"), name=name)
    if not container.openable:
        return _reject(state, ("open", "not_openable"), name=name)
    if state.container_open.get(name, False):
        return _reject(state, ("open", "already"), name=name)
    new_state = state.copy()
    new_state.container_open[name] = True
    delta = _complete_step(new_state, f"open {name}")
    contents = new_state.container_contents(name)
    if contents:
        feedback = FEEDBACK[("open", "container")].format(name=name, contents=", ".join(contents))
    else:
        feedback = FEEDBACK[("open", "container_empty")].format(name=name)
    return new_state, Observation(feedback, delta)


def _do_take(state: GameState, command: Command) -> tuple[GameState, Observation]:
    name = command.args[0]
    if name in state.inventory:
        return _reject(state, ("take", "carried"), name=name)
    entity = state.spec.entity(name)
    if entity is None:  # resolved a container or door
        return _reject(state, ("take", "fixed"), name=name)
    if entity.kind == "scenery":
        return _reject(state, ("take", "fixed"), name=name)
    kind, place = state.entity_location(name)
    reachable = (kind == "floor" and place == state.player_room) or (
        kind == "container"
        and state.spec.container(place).room == state.player_room
        and state.container_accessible(place)
    )
    if not reachable:
        return _reject(state, ("parse", "unknown_noun"), name=name)
    new_state = state.copy()
    new_state.inventory.add(name)
    new_state.dropped_at.pop(name, None)
    delta = _complete_step(new_state, f"take {name}")
    return new_state, Observation(FEEDBACK[("take", "ok")].format(name=name), delta)


def _do_drop(state: GameState, command: Command) -> tuple[GameState, Observation]:
    name = command.args[0]
    if name not in state.inventory:
        return _reject(state, ("prep", "not_held"), name=name)
    new_state = state.copy()
    new_state.inventory.discard(name)
    new_state.dropped_at[name] = state.player_room
    return new_state, Observation(FEEDBACK[("drop", "ok")].format(name=name))


def _do_examine(state: GameState, command: Command) -> tuple[GameState, Observation]:
    name = command.args[0]
    new_state = state.copy()
    doors = state.doors_here()
    if name in doors:
        is_open = state.door_open[doors[name]]
        return new_state, Observation(
            FEEDBACK[("examine", "door")].format(name=name, state="open" if is_open else "closed")
        )
    container = state.spec.container(name)
    if container is not None and container.room == state.player_room:
        if not state.container_accessible(name):
            return new_state, Observation(FEEDBACK[("examine", "container_closed")].format(name=name))
        contents = state.container_contents(name)
        if not contents:
            return new_state, Observation(FEEDBACK[("examine", "container_empty")].format(name=name))
        return new_state, Observation(
            FEEDBACK[("examine", "container")].format(name=name, contents=", ".join(contents))
        )
    article = "an" if name[0] in "aeiou" else "a"
    return new_state, Observation(FEEDBACK[("examine", "item")].format(article=article, name=name))


def _pending_blocker(state: GameState, quest_step) -> str | None:
    unmet = sorted(quest_step.prerequisites - state.completed_steps)
    if not unmet:
        return None
    return state.spec.step(unmet[0]).phrase


def _do_prep(state: GameState, command: Command) -> tuple[GameState, Observation]:
    verb = command.verb
    name = command.args[0]
    step_id = f"{verb} {name}"
    try:
        quest_step = state.spec.step(step_id)
    except KeyError:
        return _reject(state, ("prep", "not_applicable"), verb=verb, name=name)
    if step_id in state.completed_steps:
        return _reject(state, ("prep", "already"), verb_past=PAST_TENSE[verb], name=name)
    if name not in state.inventory:
        return _reject(state, ("prep", "not_held"), name=name)
    if quest_step.tool is not None and quest_step.tool not in state.inventory:
        return _reject(state, ("prep", "missing_tool"), tool=quest_step.tool, verb=verb, name=name)
    blocker = _pending_blocker(state, quest_step)
    if blocker is not None:
        return _reject(state, ("prep", "not_ready"), blocker=blocker)
    new_state = state.copy()
    delta = _complete_step(new_state, step_id)
    return new_state, Observation(FEEDBACK[("prep", "ok")].format(verb=verb, name=name), delta)


def _do_goal(state: GameState, command: Command) -> tuple[GameState, Observation]:
    if state.player_room != "kitchen":
        return _reject(state, ("goal", "wrong_room"))
    goal = state.spec.step(state.spec.goal_step)
    if not goal.prerequisites <= state.completed_steps:
        return _reject(state, ("goal", "not_ready"))
    new_state = state.copy()
    delta = _complete_step(new_state, goal.id)
    new_state.done = True
    return new_state, Observation(
        FEEDBACK[("goal", "ok")].format(title=state.spec.recipe.title), delta
    )


# --- admissibility -----------------------------------------------------------


def admissible_actions(state: GameState) -> list[str]:
    """Every command string that would currently be understood and legal."""
    if state.done:
        return []
    actions = ["look", "inventory"]
    for room in state.spec.map.adjacent(state.player_room):
        door_state = state.spec.map.door_state(state.player_room, room)
        if door_state == "none" or state.door_open[frozenset((state.player_room, room))]:
            actions.append(f"go {room}")
    for name, key in state.doors_here().items():
        if not state.door_open[key]:
            actions.append(f"open {name}")
    for name in state.room_containers():
        container = state.spec.container(name)
        if container.openable and not state.container_open.get(name, False):
            actions.append(f"open {name}")
        actions.append(f"examine {name}")
    for name in state.visible_entities():
        actions.append(f"examine {name}")
        if name not in state.inventory:
            entity = state.spec.entity(name)
            if entity is not None and entity.kind != "scenery":
                actions.append(f"take {name}")
    for name in sorted(state.inventory):
        actions.append(f"drop {name}")
    for quest_step in state.spec.quest:
        if quest_step.verb not in PREP_VERBS or quest_step.id in state.completed_steps:
            continue
        if quest_step.object not in state.inventory:
            continue
        if quest_step.tool is not None and quest_step.tool not in state.inventory:
            continue
        if quest_step.prerequisites <= state.completed_steps:
            actions.append(quest_step.id)
    goal = state.spec.step(state.spec.goal_step)
    if (
        state.player_room == "kitchen"
        and state.spec.goal_step not in state.completed_steps
        and goal.prerequisites <= state.completed_steps
    ):
        actions.append("prepare meal")
    return sorted(set(actions))
