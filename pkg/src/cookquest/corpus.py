"""Recipe corpus loading, ingredient normalization, and the co-occurrence graph.

The corpus file is a JSON array of recipe records::

    [{"id": "r1", "title": "Sponge Cake",
      "ingredients": ["2 eggs", "1 cup white sugar", ...],
      "instructions": "..."}, ...]

Each recipe's ingredient lines are normalized to canonical names, every
recipe becomes a set of unordered ingredient pairs, and the graph collects
pair counts across the whole corpus: the weight of an edge is the number of
recipes in which that pair co-occurs.  Pairs that never co-occur have no
edge at all.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

logger = logging.getLogger(__name__)


class CorpusError(Exception):
    """Corpus file unreadable or an entry is malformed (strict mode)."""


class NormalizationError(Exception):
    """An ingredient line normalized down to nothing."""


class GraphFormatError(Exception):
    """A serialized graph file does not match the expected format."""


@dataclass(frozen=True)
class RawRecipe:
    """One corpus entry, exactly as read from the file."""

    id: str
    title: str
    ingredient_lines: tuple[str, ...]
    instruction_text: str = ""


@dataclass(frozen=True, order=True)
class CanonicalIngredient:
    """A normalized ingredient name plus its 1-gram token bag."""

    name: str
    token_bag: frozenset[str] = field(compare=False)

    @classmethod
    def of(cls, name: str) -> "CanonicalIngredient":
        return cls(name=name, token_bag=frozenset(name.split()))


# Fixed prefix grammar for quantity/unit stripping: leading amounts
# (integers, decimals, fractions, ranges) and unit words are dropped, plus
# a single "of" directly after them.  Anything beyond this stays untouched.
_AMOUNT_RE = re.compile(r"^(\d+([./-]\d+)*|[¼½¾⅓⅔⅛⅜⅝⅞])$")

UNIT_WORDS = frozenset(
    {
        "cup", "cups", "tablespoon", "tablespoons", "tbsp", "teaspoon",
        "teaspoons", "tsp", "ounce", "ounces", "oz", "pound", "pounds",
        "lb", "lbs", "gram", "grams", "g", "kg", "kilogram", "kilograms",
        "ml", "milliliter", "milliliters", "liter", "liters", "l",
        "pinch", "pinches", "dash", "dashes", "slice", "slices", "stick",
        "sticks", "can", "cans", "package", "packages", "pkg", "quart",
        "quarts", "pint", "pints", "gallon", "gallons", "bunch", "bunches",
        "head", "heads", "clove", "cloves", "sprig", "sprigs", "piece",
        "pieces", "stalk", "stalks", "leaf", "leaves", "large", "medium",
        "small", "whole",
    }
)


@dataclass(frozen=True)
class NormalizationRules:
    """Merge and brand substitution tables, applied after prefix stripping.

    Both maps key on fully stripped lowercase names.  Rules are validated to
    be idempotent at construction: every target must already be canonical
    under the same rules.
    """

    merge_map: dict[str, str] = field(default_factory=dict)
    brand_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for source, target in list(self.brand_map.items()) + list(self.merge_map.items()):
            canon = normalize(target, _RULELESS).name
            canon = self.brand_map.get(canon, canon)
            canon = self.merge_map.get(canon, canon)
            if canon != target:
                raise ValueError(
                    f"normalization rule {source!r} -> {target!r} is not idempotent "
                    f"(target renormalizes to {canon!r})"
                )

    @classmethod
    def empty(cls) -> "NormalizationRules":
        return _RULELESS

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizationRules":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("rules-version") != 1:
            raise ValueError(f"unsupported rules-version in {path}: {data.get('rules-version')!r}")
        return cls(merge_map=dict(data.get("merge", {})), brand_map=dict(data.get("brand", {})))


_RULELESS = NormalizationRules.__new__(NormalizationRules)
object.__setattr__(_RULELESS, "merge_map", {})
object.__setattr__(_RULELESS, "brand_map", {})


def _strip_prefix(tokens: list[str]) -> list[str]:
    i = 0
    while i < len(tokens) and (_AMOUNT_RE.match(tokens[i]) or tokens[i] in UNIT_WORDS):
        i += 1
    if 0 < i < len(tokens) and tokens[i] == "of":
        i += 1
    return tokens[i:]


def normalize(raw_line: str, rules: NormalizationRules | None = None) -> CanonicalIngredient:
    """Normalize one free-text ingredient line to a canonical ingredient.

    Lowercases, strips the quantity/unit prefix, then applies the brand and
    merge tables.  Raises NormalizationError if nothing is left.
    """
    rules = rules or _RULELESS
    if not raw_line or not raw_line.strip():
        raise NormalizationError("empty ingredient line")
    cleaned = re.sub(r"[(),]", " ", raw_line.lower())
    tokens = _strip_prefix(cleaned.split())
    name = " ".join(tokens)
    name = rules.brand_map.get(name, name)
    name = rules.merge_map.get(name, name)
    if not name:
        raise NormalizationError(f"line {raw_line!r} normalized to an empty name")
    return CanonicalIngredient.of(name)


def parse_corpus(path: str | Path, strict: bool = False) -> list[RawRecipe]:
    """Read a corpus file into RawRecipes, in file order.

    Malformed entries are skipped with a warning naming the entry index, or
    abort with CorpusError when ``strict`` is set.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    if not text.strip():
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"corpus file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise CorpusError(f"corpus file {path} must contain a JSON array of recipes")

    recipes: list[RawRecipe] = []
    seen_ids: set[str] = set()
    for index, entry in enumerate(data):
        problem = _entry_problem(entry, seen_ids)
        if problem:
            if strict:
                raise CorpusError(f"corpus entry {index}: {problem}")
            logger.warning("skipping corpus entry %d: %s", index, problem)
            continue
        seen_ids.add(entry["id"])
        recipes.append(
            RawRecipe(
                id=entry["id"],
                title=entry.get("title", ""),
                ingredient_lines=tuple(entry["ingredients"]),
                instruction_text=entry.get("instructions", ""),
            )
        )
    return recipes


def _entry_problem(entry: object, seen_ids: set[str]) -> str | None:
    if not isinstance(entry, dict):
        return "not an object"
    if not isinstance(entry.get("id"), str) or not entry["id"]:
        return "missing or invalid 'id'"
    if entry["id"] in seen_ids:
        return f"duplicate id {entry['id']!r}"
    ingredients = entry.get("ingredients")
    if not isinstance(ingredients, list) or not ingredients:
        return "missing or empty 'ingredients'"
    if not all(isinstance(line, str) and line.strip() for line in ingredients):
        return "non-string or blank ingredient line"
    return None


def recipe_ingredients(recipe: RawRecipe, rules: NormalizationRules) -> list[CanonicalIngredient]:
    """Canonical ingredients of one recipe, in line order, duplicates collapsed.

    Lines that normalize to nothing are dropped.
    """
    out: list[CanonicalIngredient] = []
    seen: set[str] = set()
    for line in recipe.ingredient_lines:
        try:
            ing = normalize(line, rules)
        except NormalizationError:
            logger.debug("recipe %s: dropping unnormalizable line %r", recipe.id, line)
            continue
        if ing.name not in seen:
            seen.add(ing.name)
            out.append(ing)
    return out


def extract_pairs(recipe: RawRecipe, rules: NormalizationRules) -> set[frozenset[str]]:
    """All unordered pairs of the recipe's distinct canonical ingredients."""
    names = sorted(ing.name for ing in recipe_ingredients(recipe, rules))
    return {frozenset(pair) for pair in combinations(names, 2)}


class IngredientGraph:
    """Undirected weighted graph of canonical ingredients.

    Edge weights count the recipes in which a pair co-occurs; absent pairs
    have weight 0 and are never stored.  Instances are immutable once built
    and safe to share across threads.
    """

    def __init__(self, nodes: dict[str, CanonicalIngredient], adjacency: dict[str, dict[str, int]]):
        self._nodes = dict(nodes)
        self._adj = {a: dict(nbrs) for a, nbrs in adjacency.items()}
        for name in self._nodes:
            self._adj.setdefault(name, {})
        self._names = tuple(sorted(self._nodes))
        self._degree = {a: sum(self._adj[a].values()) for a in self._names}
        self._total_ordered = sum(self._degree.values())

    @property
    def node_names(self) -> tuple[str, ...]:
        return self._names

    @property
    def node_count(self) -> int:
        return len(self._names)

    @property
    def edge_count(self) -> int:
        return sum(len(n) for n in self._adj.values()) // 2

    @property
    def total_ordered_weight(self) -> int:
        """Sum of w(a, b) over ordered pairs: twice the undirected total."""
        return self._total_ordered

    def node(self, name: str) -> CanonicalIngredient:
        return self._nodes[name]

    def weight(self, a: str, b: str) -> int:
        return self._adj.get(a, {}).get(b, 0)

    def weighted_degree(self, name: str) -> int:
        return self._degree.get(name, 0)

    def neighbors(self, name: str) -> list[str]:
        return sorted(self._adj.get(name, {}))

    def edges(self) -> list[tuple[str, str, int]]:
        """All undirected edges as (a, b, weight) with a < b, sorted."""
        out = []
        for a in self._names:
            for b, w in self._adj[a].items():
                if a < b:
                    out.append((a, b, w))
        out.sort()
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IngredientGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._adj == other._adj

    def __repr__(self) -> str:
        return f"IngredientGraph(nodes={self.node_count}, edges={self.edge_count})"

    def to_file(self, path: str | Path) -> None:
        """Write the graph as a diffable adjacency table (sorted, a < b)."""
        lines = [f"nodes={self.node_count} edges={self.edge_count}"]
        lines += [f"{a}\t{b}\t{w}" for a, b, w in self.edges()]
        isolated = [n for n in self._names if not self._adj[n]]
        lines += [f"{n}\t\t0" for n in isolated]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "IngredientGraph":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise GraphFormatError("empty graph file")
        header = re.match(r"^nodes=(\d+) edges=(\d+)$", lines[0])
        if not header:
            raise GraphFormatError(f"bad graph header: {lines[0]!r}")
        nodes: dict[str, CanonicalIngredient] = {}
        adj: dict[str, dict[str, int]] = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected 3 tab-separated fields")
            a, b, w_str = parts
            if not b:  # isolated node row
                nodes[a] = CanonicalIngredient.of(a)
                adj.setdefault(a, {})
                continue
            try:
                w = int(w_str)
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: bad weight {w_str!r}") from exc
            if w < 1:
                raise GraphFormatError(f"line {lineno}: weight must be >= 1")
            for name in (a, b):
                nodes.setdefault(name, CanonicalIngredient.of(name))
                adj.setdefault(name, {})
            adj[a][b] = w
            adj[b][a] = w
        graph = cls(nodes, adj)
        if graph.node_count != int(header.group(1)) or graph.edge_count != int(header.group(2)):
            raise GraphFormatError(
                f"header says nodes={header.group(1)} edges={header.group(2)} but file has "
                f"nodes={graph.node_count} edges={graph.edge_count}"
            )
        return graph


def build_graph(recipes: list[RawRecipe], rules: NormalizationRules) -> IngredientGraph:
    """Build the co-occurrence graph: weight(a, b) = recipes containing both."""
    if not recipes:
        raise CorpusError("cannot build a graph from zero recipes")
    pair_counts: Counter[frozenset[str]] = Counter()
    nodes: dict[str, CanonicalIngredient] = {}
    for recipe in recipes:
        ingredients = recipe_ingredients(recipe, rules)
        for ing in ingredients:
            nodes.setdefault(ing.name, ing)
        names = sorted({ing.name for ing in ingredients})
        pair_counts.update(frozenset(p) for p in combinations(names, 2))
    if not nodes:
        raise CorpusError("all recipes were empty after normalization")
    adj: dict[str, dict[str, int]] = {name: {} for name in nodes}
    for pair, count in pair_counts.items():
        a, b = sorted(pair)
        adj[a][b] = count
        adj[b][a] = count
    return IngredientGraph(nodes, adj)


def corpus_ingredient_sets(recipes: list[RawRecipe], rules: NormalizationRules) -> set[frozenset[str]]:
    """The corpus's recipe ingredient sets, for novelty checks."""
    return {
        frozenset(ing.name for ing in recipe_ingredients(recipe, rules))
        for recipe in recipes
    }
