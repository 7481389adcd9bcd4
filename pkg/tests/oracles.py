"""Independent brute-force oracles used to check the implementation.

Everything here recomputes expected values from first principles with plain
loops over plain dicts, deliberately sharing no code with the package's own
graph, sampler, or planner implementations.
"""

from collections import deque
from itertools import combinations

# Toy corpus T, written out by hand (ids t1..t5).
TOY_RECIPES = {
    "t1": ["eggs", "white sugar", "flour", "butter"],
    "t2": ["eggs", "white sugar", "butter", "vanilla"],
    "t3": ["flour", "butter", "salt"],
    "t4": ["fish", "lemon", "salt"],
    "t5": ["eggs", "flour", "milk"],
}


def pair_weights(recipes):
    """recipe name-lists -> {frozenset({a, b}): co-occurrence count}."""
    weights = {}
    for names in recipes.values() if isinstance(recipes, dict) else recipes:
        for a, b in combinations(sorted(set(names)), 2):
            key = frozenset((a, b))
            weights[key] = weights.get(key, 0) + 1
    return weights


def weighted_degrees(weights):
    degrees = {}
    for pair, w in weights.items():
        for name in pair:
            degrees[name] = degrees.get(name, 0) + w
    return degrees


def initial_distribution(weights):
    """First-pick distribution: weighted degree over the ordered-pair total."""
    degrees = weighted_degrees(weights)
    total = sum(degrees.values())
    return {name: deg / total for name, deg in degrees.items()}


def bag(name):
    return frozenset(name.split())


def next_distribution(weights, vocabulary, selected):
    """Distribution of the next pick given already-selected ingredient names.

    Recomputes the bag-exclusion, the squared shared-edge bias, and the
    conditional transition term for every candidate, then normalizes.
    """
    degrees = weighted_degrees(weights)

    def w(a, b):
        return weights.get(frozenset((a, b)), 0)

    scores = {}
    for candidate in vocabulary:
        if candidate in selected:
            continue
        if any(bag(s) <= bag(candidate) or bag(candidate) <= bag(s) for s in selected):
            continue
        shared = sum(1 for s in selected if w(s, candidate) > 0)
        if shared == 0:
            continue
        transition = sum(
            w(s, candidate) / degrees[s] for s in selected if degrees.get(s, 0) > 0
        )
        score = (shared * shared) * transition
        if score > 0:
            scores[candidate] = score
    total = sum(scores.values())
    return {name: score / total for name, score in scores.items()}


def total_variation(p, q):
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


# --- plan-length oracles -----------------------------------------------------


def shortest_plan_length_formula(spec):
    """Closed-form optimum for tree maps.

    Quest actions cost one command each; preparation can happen anywhere, so
    the only walking that matters is a minimal tour from the kitchen through
    every room holding a quest item and back, which on a tree is twice the
    Steiner subtree, plus one command per closed door on it.
    """
    rooms = spec.map.rooms
    edges = {frozenset((a, b)): state for a, b, state in spec.map.connections}
    assert len(edges) == len(rooms) - 1, "formula assumes a tree map"

    adjacency = {room: [] for room in rooms}
    for pair in edges:
        a, b = sorted(pair)
        adjacency[a].append(b)
        adjacency[b].append(a)

    parent = {"kitchen": None}
    queue = deque(["kitchen"])
    while queue:
        here = queue.popleft()
        for nbr in adjacency[here]:
            if nbr not in parent:
                parent[nbr] = here
                queue.append(nbr)

    containers = {c.name: c.room for c in spec.containers}
    required = set()
    for entity in spec.entities:
        required.add(containers[entity.location] if entity.inside else entity.location)
    required.add("kitchen")

    steiner = set()
    for room in required:
        node = room
        while parent[node] is not None:
            steiner.add(frozenset((node, parent[node])))
            node = parent[node]
    closed_doors = sum(1 for e in steiner if edges[e] == "closed")
    return len(spec.quest) + 2 * len(steiner) + closed_doors


def exhaustive_shortest_plan(spec, state_cap=400_000):
    """Plain BFS over the engine with full branching (drops and all).

    Independent of the planner: it uses only engine.submit and
    engine.admissible_actions, and returns the true shortest plan length.
    """
    from cookquest import engine

    def key(state):
        return (
            state.player_room,
            frozenset(state.inventory),
            frozenset(k for k, v in state.container_open.items() if v),
            frozenset(k for k, v in state.door_open.items() if v),
            frozenset(state.completed_steps),
            tuple(sorted(state.dropped_at.items())),
        )

    start = engine.new_game(spec)
    seen = {key(start)}
    queue = deque([(start, 0)])
    while queue:
        state, depth = queue.popleft()
        if state.done:
            return depth
        if len(seen) > state_cap:
            raise RuntimeError("state cap exceeded")
        for command in engine.admissible_actions(state):
            if command in ("look", "inventory") or command.startswith("examine "):
                continue  # provably state-neutral
            nxt, obs = engine.submit(state, command)
            k = key(nxt)
            if k not in seen:
                seen.add(k)
                queue.append((nxt, depth + 1))
    return None
