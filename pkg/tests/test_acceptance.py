"""Acceptance criteria, one test per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  The big generation matrix (100 seeds x mode x map x size) is
built once and shared by the solvability, coherence, and complexity tests.
"""

import time
from collections import Counter
from itertools import combinations

import pytest
from scipy import stats

import oracles
from cookquest import cli, engine, solver
from cookquest.corpus import CanonicalIngredient, IngredientGraph, recipe_ingredients
from cookquest.recipegen import (
    GenerationParams,
    generate_markov,
    make_rng,
    next_ingredient,
    sample_initial,
)

SEEDS = 100


def report(line: str) -> None:
    print(f"\n[ACCEPTANCE] {line}", flush=True)


# --- criterion: initial-draw oracle (chi-square over 100k draws, < 5 s) -----


def test_initial_sampling_matches_bruteforce_oracle(toy_graph):
    started = time.perf_counter()
    expected = oracles.initial_distribution(oracles.pair_weights(oracles.TOY_RECIPES))
    draws = sample_initial(toy_graph, make_rng(2024), size=100_000)
    counts = Counter(ing.name for ing in draws)
    names = sorted(expected)
    observed = [counts.get(name, 0) for name in names]
    expectation = [expected[name] * 100_000 for name in names]
    result = stats.chisquare(observed, expectation)
    elapsed = time.perf_counter() - started
    assert result.pvalue > 0.01, f"chi-square p={result.pvalue:.5f}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    report(
        f"initial-draw distribution: chi-square p={result.pvalue:.3f} over 100,000 draws "
        f"({elapsed:.2f}s) PASS"
    )


# --- criterion: next-draw oracle (50 fixtures, TV <= 0.02, < 60 s) -----------

NAME_POOL = [
    "fish", "red fish", "corn", "blue corn", "pea", "green pea",
    "milk", "salt", "rice", "oat", "plum", "kale",
]


def _random_fixture(rng):
    """A random weighted graph plus a selected prefix with eligible successors."""
    while True:
        size = int(rng.integers(6, len(NAME_POOL) + 1))
        names = sorted(str(n) for n in rng.choice(NAME_POOL, size=size, replace=False))
        nodes = {n: CanonicalIngredient.of(n) for n in names}
        adj = {n: {} for n in names}
        weights = {}
        for a, b in combinations(names, 2):
            if rng.random() < 0.55:
                w = int(rng.integers(1, 10))
                adj[a][b] = w
                adj[b][a] = w
                weights[frozenset((a, b))] = w
        if not weights:
            continue
        graph = IngredientGraph(nodes, adj)
        n_selected = int(rng.integers(1, 4))
        selected = [str(s) for s in rng.choice(names, size=n_selected, replace=False)]
        expected = oracles.next_distribution(weights, names, selected)
        if expected:
            return graph, selected, expected


def test_next_ingredient_matches_bruteforce_oracle_over_50_fixtures():
    started = time.perf_counter()
    rng = make_rng(99)
    worst = 0.0
    for _ in range(50):
        graph, selected, expected = _random_fixture(rng)
        draws = next_ingredient(
            graph, [CanonicalIngredient.of(s) for s in selected], rng, size=50_000
        )
        counts = Counter(ing.name for ing in draws)
        empirical = {name: c / 50_000 for name, c in counts.items()}
        tv = oracles.total_variation(empirical, expected)
        assert tv <= 0.02, f"TV={tv:.4f} for selected={selected}"
        worst = max(worst, tv)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"took {elapsed:.2f}s"
    report(
        f"next-ingredient distribution: 50 fixtures x 50,000 draws, worst TV={worst:.4f} "
        f"({elapsed:.1f}s) PASS"
    )


# --- criteria: alpha/beta properties and novelty over 1,000 generations ------


@pytest.fixture(scope="module")
def thousand_markov(sample_graph, sample_sets):
    recipes = []
    for seed in range(1000):
        recipes.append(
            generate_markov(sample_graph, sample_sets, GenerationParams(n_ingredients=4, seed=seed))
        )
    return recipes


def test_alpha_exclusion_and_positive_scores_over_1000_generations(
    thousand_markov, sample_recipes, sample_graph, rules
):
    weights = oracles.pair_weights(
        [[i.name for i in recipe_ingredients(r, rules)] for r in sample_recipes]
    )
    subset_violations = 0
    zero_score_emissions = 0
    for recipe in thousand_markov:
        bags = [ing.token_bag for ing in recipe.ingredients]
        for a, b in combinations(range(len(bags)), 2):
            if bags[a] <= bags[b] or bags[b] <= bags[a]:
                subset_violations += 1
        names = recipe.ingredient_names
        for i in range(1, len(names)):
            dist = oracles.next_distribution(weights, sample_graph.node_names, names[:i])
            if dist.get(names[i], 0.0) <= 0.0:
                zero_score_emissions += 1
    assert subset_violations == 0
    assert zero_score_emissions == 0
    report(
        "alpha/beta properties: 0 subset violations, 0 zero-score emissions "
        "over 1,000 markov generations PASS"
    )


def test_novelty_against_corpus_over_1000_generations(thousand_markov, sample_sets):
    collisions = sum(1 for r in thousand_markov if r.ingredient_set() in sample_sets)
    assert collisions == 0
    report("novelty: 0 of 1,000 markov ingredient sets matched a corpus recipe PASS")


# --- the generation matrix ----------------------------------------------------


@pytest.fixture(scope="module")
def matrix(sample_graph, sample_sets, sample_model, kb1, kb5):
    """(mode, map, n) -> list of (seed, spec, plan); 100 seeds per cell."""
    started = time.perf_counter()
    kbs = {"1R": kb1, "5R": kb5}
    cells = {}
    specs = []
    for mode, n_values in (("markov", (4, 8)), ("random", (4, 8)), ("ngram", (None,))):
        for map_id in ("1R", "5R"):
            for n in n_values:
                runs = []
                for seed in range(SEEDS):
                    spec = solver.generate_game(
                        mode,
                        n or 4,
                        seed,
                        kbs[map_id],
                        sample_graph,
                        corpus_sets=sample_sets,
                        model=sample_model,
                    )
                    result = solver.solve(spec)
                    runs.append((seed, spec, result))
                cells[(mode, map_id, n)] = runs
                specs.append((mode, map_id, n))
    cells["elapsed"] = time.perf_counter() - started
    return cells


def test_solvability_gate_100_percent(matrix):
    total = 0
    for key, runs in matrix.items():
        if key == "elapsed":
            continue
        for seed, spec, result in runs:
            assert result.solvable, f"{key} seed {seed}: {result.failure_reason}"
            # independent replay through the engine, not trusting the solver
            state = engine.new_game(spec)
            for command in result.plan:
                state, obs = engine.submit(state, command)
                assert obs.admissible, f"{key} seed {seed}: {command!r} rejected"
            assert state.done and state.score == spec.score_max
            total += 1
    elapsed = matrix["elapsed"]
    assert elapsed < 300.0, f"matrix took {elapsed:.1f}s"
    report(
        f"solvability gate: {total} games (100 seeds x 10 cells) all solvable, "
        f"all plans replay to full score ({elapsed:.1f}s incl. generation) PASS"
    )


def test_coherence_contrast_vegetable_placement(matrix, kb1):
    grounded_total, grounded_in_fridge = 0, 0
    for key in (("markov", "1R", 4), ("markov", "1R", 8), ("ngram", "1R", None)):
        for _, spec, _ in matrix[key]:
            for entity in spec.entities:
                if entity.kind == "ingredient" and kb1.category_of(entity.name) == "vegetable":
                    grounded_total += 1
                    grounded_in_fridge += entity.location == "refrigerator"
    ra_total, ra_elsewhere = 0, 0
    for key in (("random", "1R", 4), ("random", "1R", 8)):
        for _, spec, _ in matrix[key]:
            for entity in spec.entities:
                if entity.kind == "ingredient" and kb1.category_of(entity.name) == "vegetable":
                    ra_total += 1
                    ra_elsewhere += entity.location != "refrigerator"
    assert grounded_total > 0, "no vegetables generated; contrast would be vacuous"
    assert grounded_in_fridge == grounded_total
    assert ra_elsewhere > 0
    report(
        f"coherence contrast: grounded modes {grounded_in_fridge}/{grounded_total} vegetables "
        f"in the refrigerator (100%); RA scattered {ra_elsewhere}/{ra_total} elsewhere PASS"
    )


def test_complexity_ordering_mean_plan_lengths(matrix):
    def mean_plan(key):
        runs = matrix[key]
        return sum(result.plan_length for _, _, result in runs) / len(runs)

    lines = []
    for mode, n in (("markov", 4), ("markov", 8), ("random", 4), ("random", 8), ("ngram", None)):
        one, five = mean_plan((mode, "1R", n)), mean_plan((mode, "5R", n))
        assert five > one, f"{mode} n={n}: 5R {five:.2f} <= 1R {one:.2f}"
        lines.append(f"{mode}/n={n}: 1R {one:.2f} < 5R {five:.2f}")
    for mode in ("markov", "random"):
        for map_id in ("1R", "5R"):
            small, big = mean_plan((mode, map_id, 4)), mean_plan((mode, map_id, 8))
            assert big > small, f"{mode} {map_id}: n=8 {big:.2f} <= n=4 {small:.2f}"
            lines.append(f"{mode}/{map_id}: n=4 {small:.2f} < n=8 {big:.2f}")
    report("complexity ordering: " + "; ".join(lines) + " PASS")


# --- criterion: byte-identical regeneration -----------------------------------


@pytest.mark.parametrize("mode", ["markov", "ngram", "random"])
def test_determinism_byte_identical_spec_files(mode, tmp_path):
    out = []
    for run in range(2):
        path = tmp_path / f"{mode}-{run}.game.json"
        code = cli.run([
            "gen", "--mode", mode, "--map", "5R", "--complexity", "complex",
            "--seed", "7", "--out", str(path),
        ])
        assert code == 0
        out.append(path.read_bytes())
    assert out[0] == out[1]
    report(f"determinism: `gen --mode {mode}` twice -> byte-identical spec files PASS")


# --- criterion: full-scale corpus statistics (conditional) ---------------------


def test_corpus_statistics_at_full_scale():
    pytest.skip(
        "full-scale recipe dataset not available in this environment; "
        "expected when present: 118,116 unique pairs, 62% singletons, "
        "weight(eggs, white sugar)=3774 -- report differences, not failure"
    )
