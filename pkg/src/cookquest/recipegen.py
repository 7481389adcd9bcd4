"""Recipe generators: weighted graph walk, n-gram sequence model, uniform random.

The graph walk picks a first ingredient by weighted degree, then repeatedly
scores every remaining node against the already-selected ingredients:

    score(x) = alpha(x) * beta(x) * sum_i w(x_i, x) / deg_w(x_i)

where alpha knocks out candidates whose token bag nests with any selected
ingredient's bag, and beta = (number of selected ingredients sharing an
edge with x) squared.  Scores are renormalized over the eligible candidates
and the next ingredient is drawn from that distribution.  A finished walk
is rejected and restarted if its ingredient set already appears in the
corpus.

All generators are pure functions of (inputs, seed): the random stream is a
seeded PCG64 generator whose algorithm id is recorded in the recipe
provenance, so any output can be reproduced from (mode, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .card import title_for
from .corpus import CanonicalIngredient, IngredientGraph, NormalizationRules, RawRecipe, recipe_ingredients

RNG_ALGORITHM = "pcg64"

MODES = ("markov", "ngram", "random")

#: end-of-ingredients sentinel emitted after every training sequence
END = "<END>"
#: start-of-sequence sentinel, used only inside n-gram contexts
BOS = "<S>"

#: n-gram recipes stop at this many ingredients even without an END draw
NGRAM_CAP = 12


class GenerationError(Exception):
    pass


class DeadEndError(GenerationError):
    """A walk reached a state with no eligible candidate."""


class GenerationFailedError(GenerationError):
    """All retries were used up; carries counters for diagnosis."""

    def __init__(self, message: str, attempts: int, dead_ends: int, novelty_rejections: int):
        super().__init__(
            f"{message} (attempts={attempts}, dead_ends={dead_ends}, "
            f"novelty_rejections={novelty_rejections})"
        )
        self.attempts = attempts
        self.dead_ends = dead_ends
        self.novelty_rejections = novelty_rejections


@dataclass(frozen=True)
class GenerationParams:
    n_ingredients: int = 4
    seed: int = 0
    max_retries: int = 100
    mode: str = "markov"
    top_k: int = 5

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.n_ingredients < 2:
            raise ValueError("n_ingredients must be >= 2")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


@dataclass
class Recipe:
    """A generated recipe: what to gather, shown as the quest's recipe card.

    ``steps`` stays empty until the recipe is grounded against a world
    knowledge base, which knows how each ingredient gets prepared.
    """

    ingredients: list[CanonicalIngredient]
    title: str
    steps: list[str] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def ingredient_names(self) -> list[str]:
        return [ing.name for ing in self.ingredients]

    def ingredient_set(self) -> frozenset[str]:
        return frozenset(self.ingredient_names)


def make_rng(seed: int) -> np.random.Generator:
    """The project-wide deterministic random stream (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def _provenance(mode: str, params: GenerationParams) -> dict:
    return {"mode": mode, "seed": params.seed, "rng": RNG_ALGORITHM}


def sample_initial(
    graph: IngredientGraph, rng: np.random.Generator, size: int | None = None
) -> CanonicalIngredient | list[CanonicalIngredient]:
    """Draw the walk's first ingredient, weighted by its share of all edges.

    p(x) = deg_w(x) / total ordered weight.  With ``size`` set, returns that
    many independent draws from one probability computation.
    """
    total = graph.total_ordered_weight
    if total == 0:
        raise GenerationError("graph has no edges to sample from")
    names = graph.node_names
    probs = np.array([graph.weighted_degree(n) for n in names], dtype=float) / total
    if size is None:
        return graph.node(names[_draw(rng, probs)])
    return [graph.node(names[i]) for i in rng.choice(len(names), size=size, p=probs)]


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    return int(rng.choice(len(probs), p=probs))


def alpha(candidate: CanonicalIngredient, selected: Sequence[CanonicalIngredient]) -> int:
    """1 unless the candidate's token bag nests with any selected bag."""
    bag = candidate.token_bag
    for chosen in selected:
        if chosen.token_bag <= bag or bag <= chosen.token_bag:
            return 0
    return 1


def beta(
    candidate: CanonicalIngredient,
    selected: Sequence[CanonicalIngredient],
    graph: IngredientGraph,
) -> int:
    """Squared count of selected ingredients sharing a corpus edge with the candidate."""
    shared = sum(1 for chosen in selected if graph.weight(chosen.name, candidate.name) > 0)
    return shared * shared


def _candidate_scores(
    graph: IngredientGraph, selected: Sequence[CanonicalIngredient]
) -> tuple[list[str], np.ndarray]:
    """Names and renormalized scores of every eligible next ingredient."""
    chosen_names = {ing.name for ing in selected}
    names: list[str] = []
    scores: list[float] = []
    for name in graph.node_names:
        if name in chosen_names:
            continue
        candidate = graph.node(name)
        if not alpha(candidate, selected):
            continue
        b = beta(candidate, selected, graph)
        if b == 0:
            continue
        transition = sum(
            graph.weight(chosen.name, name) / graph.weighted_degree(chosen.name)
            for chosen in selected
            if graph.weighted_degree(chosen.name) > 0
        )
        score = b * transition
        if score > 0:
            names.append(name)
            scores.append(score)
    if not names:
        return [], np.empty(0)
    arr = np.array(scores, dtype=float)
    return names, arr / arr.sum()


def next_ingredient(
    graph: IngredientGraph,
    selected: Sequence[CanonicalIngredient],
    rng: np.random.Generator,
    size: int | None = None,
) -> CanonicalIngredient | list[CanonicalIngredient]:
    """Sample the next ingredient given the selected ones.

    Raises DeadEndError when no candidate is eligible (alpha zero everywhere
    or no shared edges).  ``size`` draws that many independent samples from
    the same state, for distribution-level checks.
    """
    if not selected:
        raise ValueError("selected must be non-empty; use sample_initial first")
    names, probs = _candidate_scores(graph, selected)
    if not names:
        raise DeadEndError(f"no eligible candidate after {[i.name for i in selected]}")
    if size is None:
        return graph.node(names[_draw(rng, probs)])
    return [graph.node(names[i]) for i in rng.choice(len(names), size=size, p=probs)]


def generate_markov(
    graph: IngredientGraph,
    corpus_sets: set[frozenset[str]],
    params: GenerationParams,
    rng: np.random.Generator | None = None,
) -> Recipe:
    """Walk the ingredient graph until n ingredients are picked, novel vs the corpus.

    A dead-ended walk or a corpus collision restarts the walk from scratch on
    the same (advancing) random stream, up to params.max_retries attempts.
    """
    rng = rng if rng is not None else make_rng(params.seed)
    dead_ends = 0
    collisions = 0
    for attempt in range(1, params.max_retries + 1):
        selected = [sample_initial(graph, rng)]
        try:
            while len(selected) < params.n_ingredients:
                selected.append(next_ingredient(graph, selected, rng))
        except DeadEndError:
            dead_ends += 1
            continue
        if frozenset(ing.name for ing in selected) in corpus_sets:
            collisions += 1
            continue
        names = [ing.name for ing in selected]
        return Recipe(
            ingredients=selected,
            title=title_for(names),
            provenance=_provenance("markov", params),
        )
    raise GenerationFailedError(
        f"could not generate a novel {params.n_ingredients}-ingredient recipe",
        attempts=params.max_retries,
        dead_ends=dead_ends,
        novelty_rejections=collisions,
    )


def generate_random(
    graph: IngredientGraph,
    params: GenerationParams,
    rng: np.random.Generator | None = None,
) -> Recipe:
    """Uniform sample of n distinct ingredients; no coherence constraints."""
    rng = rng if rng is not None else make_rng(params.seed)
    names = graph.node_names
    if params.n_ingredients > len(names):
        raise GenerationError(
            f"need {params.n_ingredients} ingredients but the graph has only {len(names)} nodes"
        )
    picks = rng.choice(len(names), size=params.n_ingredients, replace=False)
    ingredients = [graph.node(names[i]) for i in picks]
    return Recipe(
        ingredients=ingredients,
        title=title_for([ing.name for ing in ingredients]),
        provenance=_provenance("random", params),
    )


@dataclass
class NgramModel:
    """Ingredient-sequence counts with backoff contexts of length 0..order-1.

    Every training sequence is one recipe's canonical ingredient list (each
    multi-word ingredient is a single token) terminated by END; sequence
    starts are marked with BOS pads so the first draw conditions on them.
    """

    order: int
    counts: dict[tuple[str, ...], dict[str, int]]

    def successors(self, context: tuple[str, ...]) -> dict[str, int] | None:
        return self.counts.get(context)


def train_ngram(
    recipes: list[RawRecipe], rules: NormalizationRules, order: int = 2
) -> NgramModel:
    """Count ingredient-token n-grams over the corpus."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not recipes:
        raise ValueError("cannot train on zero recipes")
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    for recipe in recipes:
        tokens = [ing.name for ing in recipe_ingredients(recipe, rules)]
        padded = [BOS] * (order - 1) + tokens + [END]
        for i in range(order - 1, len(padded)):
            token = padded[i]
            for length in range(order):
                context = tuple(padded[i - length : i])
                counts.setdefault(context, {})
                counts[context][token] = counts[context].get(token, 0) + 1
    return NgramModel(order=order, counts=counts)


def _top_k_successors(
    model: NgramModel, context: tuple[str, ...], top_k: int
) -> list[tuple[str, int]]:
    """Longest-match successor counts, truncated to the k most frequent.

    Ties break lexicographically so sampling stays deterministic per seed.
    """
    for start in range(len(context) + 1):
        successors = model.successors(context[start:])
        if successors:
            ranked = sorted(successors.items(), key=lambda kv: (-kv[1], kv[0]))
            return ranked[:top_k]
    return []


def sample_ngram(
    model: NgramModel,
    params: GenerationParams,
    rng: np.random.Generator | None = None,
    start: Iterable[str] = (),
) -> Recipe:
    """Emit ingredients until END (or the hard cap), top-k sampling each step.

    Already-emitted ingredients are dropped from the candidate set before
    sampling, so recipes never repeat an ingredient.  ``start`` pre-seeds the
    sequence, mainly for deterministic tests.
    """
    rng = rng if rng is not None else make_rng(params.seed)
    sequence: list[str] = list(start)
    while len(sequence) < NGRAM_CAP:
        if model.order > 1:
            context = tuple([BOS] * (model.order - 1) + sequence)[-(model.order - 1) :]
        else:
            context = ()
        ranked = _top_k_successors(model, context, params.top_k)
        candidates = [(tok, c) for tok, c in ranked if tok == END or tok not in sequence]
        if not candidates:
            break
        tokens = [tok for tok, _ in candidates]
        weights = np.array([c for _, c in candidates], dtype=float)
        token = tokens[_draw(rng, weights / weights.sum())]
        if token == END:
            break
        sequence.append(token)
    ingredients = [CanonicalIngredient.of(name) for name in sequence]
    provenance = _provenance("ngram", params)
    provenance["top_k"] = params.top_k
    provenance["order"] = model.order
    return Recipe(ingredients=ingredients, title=title_for(sequence), provenance=provenance)
