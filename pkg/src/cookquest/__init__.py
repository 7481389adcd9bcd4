"""cookquest: procedural cooking quests for text-adventure games.

Pipeline: a recipe corpus becomes a weighted ingredient co-occurrence
graph; generators (graph walk, n-gram model, uniform random) produce novel
recipes; a hand-authored world knowledge base grounds them into playable
game specs; an embedded text-adventure engine runs them; a planner proves
each one completable.
"""

from .assembly import (
    GameCondition,
    GameSpec,
    QuestStep,
    assemble,
    card_text,
    deserialize_game,
    render_instructions,
    serialize_game,
)
from .corpus import (
    CanonicalIngredient,
    IngredientGraph,
    NormalizationRules,
    RawRecipe,
    build_graph,
    corpus_ingredient_sets,
    extract_pairs,
    normalize,
    parse_corpus,
)
from .engine import GameState, Observation, admissible_actions, new_game, parse, step, submit
from .recipegen import (
    GenerationParams,
    NgramModel,
    Recipe,
    alpha,
    beta,
    generate_markov,
    generate_random,
    make_rng,
    next_ingredient,
    sample_initial,
    sample_ngram,
    train_ngram,
)
from .solver import SolveReport, generate_game, solve, validate_batch
from .worldkb import WorldKB, actions_for, default_kb, load_kb, placement_for

__version__ = "0.1.0"

__all__ = [
    "CanonicalIngredient",
    "GameCondition",
    "GameSpec",
    "GameState",
    "GenerationParams",
    "IngredientGraph",
    "NgramModel",
    "NormalizationRules",
    "Observation",
    "QuestStep",
    "RawRecipe",
    "Recipe",
    "SolveReport",
    "WorldKB",
    "actions_for",
    "admissible_actions",
    "alpha",
    "assemble",
    "beta",
    "build_graph",
    "card_text",
    "corpus_ingredient_sets",
    "default_kb",
    "deserialize_game",
    "extract_pairs",
    "generate_game",
    "generate_markov",
    "generate_random",
    "load_kb",
    "make_rng",
    "new_game",
    "next_ingredient",
    "normalize",
    "parse",
    "parse_corpus",
    "placement_for",
    "render_instructions",
    "sample_initial",
    "sample_ngram",
    "serialize_game",
    "solve",
    "step",
    "submit",
    "train_ngram",
    "validate_batch",
]
