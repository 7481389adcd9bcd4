"""Recipe card templating: titles and step phrasing.

Titles come from a fixed dish-form table keyed by ingredient count, headed
by the first ingredient ("carrot soup" style without pretending to know the
dish).  Step phrases are plain verb-object lines, so cards stay stable for
golden-file tests.
"""

from __future__ import annotations

from typing import Sequence

DISH_FORMS = {
    1: "dish",
    2: "duo",
    3: "medley",
    4: "bake",
    5: "stew",
    6: "platter",
    7: "spread",
    8: "feast",
}
DEFAULT_DISH_FORM = "dish"

GOAL_PHRASE = "prepare the meal"


def title_for(ingredient_names: Sequence[str]) -> str:
    """Template a title from the head ingredient and the dish-form table."""
    if not ingredient_names:
        return "mystery " + DEFAULT_DISH_FORM
    form = DISH_FORMS.get(len(ingredient_names), DEFAULT_DISH_FORM)
    return f"{ingredient_names[0]} {form}"


def step_phrase(verb: str, obj: str | None) -> str:
    if obj is None:
        return GOAL_PHRASE
    return f"{verb} the {obj}"
