import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from cookquest import corpus, recipegen, worldkb

DATA = Path(__file__).parent / "data"
PKG_DATA = Path(__file__).parent.parent / "src" / "cookquest" / "data"


@pytest.fixture(scope="session")
def rules():
    return corpus.NormalizationRules.from_file(PKG_DATA / "normalization_rules.json")


@pytest.fixture(scope="session")
def toy_path():
    return DATA / "toy_corpus.json"


@pytest.fixture(scope="session")
def toy_recipes(toy_path):
    return corpus.parse_corpus(toy_path)


@pytest.fixture(scope="session")
def toy_graph(toy_recipes, rules):
    return corpus.build_graph(toy_recipes, rules)


@pytest.fixture(scope="session")
def toy_sets(toy_recipes, rules):
    return corpus.corpus_ingredient_sets(toy_recipes, rules)


@pytest.fixture(scope="session")
def sample_recipes(rules):
    return corpus.parse_corpus(PKG_DATA / "sample_corpus.json")


@pytest.fixture(scope="session")
def sample_graph(sample_recipes, rules):
    return corpus.build_graph(sample_recipes, rules)


@pytest.fixture(scope="session")
def sample_sets(sample_recipes, rules):
    return corpus.corpus_ingredient_sets(sample_recipes, rules)


@pytest.fixture(scope="session")
def sample_model(sample_recipes, rules):
    return recipegen.train_ngram(sample_recipes, rules, order=2)


@pytest.fixture(scope="session")
def kb1():
    return worldkb.default_kb("1R")


@pytest.fixture(scope="session")
def kb5():
    return worldkb.default_kb("5R")


@pytest.fixture(scope="session")
def hd_1r_path():
    return PKG_DATA / "games" / "hd_1r.game.json"


@pytest.fixture(scope="session")
def hd_5r_path():
    return PKG_DATA / "games" / "hd_5r.game.json"


@pytest.fixture()
def carrot_spec(kb1):
    from cookquest import assembly
    from cookquest.corpus import CanonicalIngredient
    from cookquest.recipegen import Recipe

    recipe = Recipe(
        ingredients=[CanonicalIngredient.of("carrot")],
        title="carrot dish",
        provenance={"mode": "markov", "seed": 0},
    )
    return assembly.assemble(
        recipe, kb1, assembly.GameCondition("MCS", "1R"), recipegen.make_rng(0)
    )
