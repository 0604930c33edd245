"""Figure rendering for simulation CSV outputs.

A figure is described by a recipe file (the same ``key=value`` format the
simulator configs use) naming the input CSVs, the columns to draw and the
output image path.  Rendering is read-only over the CSVs and byte-stable:
re-running a recipe on unchanged inputs writes an identical image.
"""

from .recipe import RecipeError, parse_recipe
from .render import FIGURE_KINDS, PROTOCOL_COLORS, render

__all__ = [
    "FIGURE_KINDS",
    "PROTOCOL_COLORS",
    "RecipeError",
    "parse_recipe",
    "render",
]
