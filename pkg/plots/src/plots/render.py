"""Renderers for the five figure kinds.

Each renderer consumes a parsed recipe (see :mod:`plots.recipe`), reads the
CSVs it names, draws with matplotlib's non-interactive Agg backend and
writes a single image.  Relative CSV and output paths are resolved against
the directory containing the recipe file, so recipes can be shipped next to
the data layout they expect.

Determinism: style state is reset to matplotlib defaults per render, and
the PNG writer's software tag is stripped, so repeated renders of unchanged
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Callable

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .recipe import RecipeError, parse_recipe

# Protocol color convention used across all figures: dimerized chain (P1)
# in red, boundary-field chain (P2) in blue.
PROTOCOL_COLORS = {"P1": "tab:red", "P2": "tab:blue"}
_FALLBACK_COLORS = ("tab:green", "tab:orange", "tab:purple", "tab:brown")
_LINESTYLES = ("-", "--", ":", "-.")

_DPI = 120


# ---------------------------------------------------------------------------
# CSV access


def _read_table(path: Path) -> dict[str, list[str]]:
    if not path.is_file():
        raise RecipeError(f"input CSV not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise RecipeError(f"{path}: empty CSV, no header row")
        table: dict[str, list[str]] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in table:
                table[name].append(row[name])
    if not next(iter(table.values()), []):
        raise RecipeError(f"{path}: CSV has a header but no data rows")
    return table


def _column(table: dict[str, list[str]], name: str, path: Path) -> list[str]:
    if name not in table:
        available = ", ".join(sorted(table))
        raise RecipeError(f"column {name!r} not found in {path} (columns: {available})")
    return table[name]


def _numeric(table: dict[str, list[str]], name: str, path: Path) -> np.ndarray:
    values = _column(table, name, path)
    try:
        return np.array([float(v) for v in values])
    except ValueError as exc:
        raise RecipeError(f"column {name!r} in {path} is not numeric: {exc}") from exc


# ---------------------------------------------------------------------------
# Recipe key access


class _Recipe:
    """Tracks which keys a renderer consumed so typos are rejected."""

    def __init__(self, pairs: dict[str, str], base_dir: Path):
        self.pairs = pairs
        self.base_dir = base_dir
        self.consumed: set[str] = set()

    def get(self, key: str, default: str | None = None) -> str:
        self.consumed.add(key)
        if key in self.pairs:
            return self.pairs[key]
        if default is None:
            raise RecipeError(f"missing required recipe key {key!r}")
        return default

    def get_float(self, key: str, default: str) -> float:
        value = self.get(key, default)
        try:
            return float(value)
        except ValueError as exc:
            raise RecipeError(f"recipe key {key!r}: expected a number, got {value!r}") from exc

    def get_int(self, key: str, default: str) -> int:
        value = self.get(key, default)
        try:
            return int(value)
        except ValueError as exc:
            raise RecipeError(f"recipe key {key!r}: expected an integer, got {value!r}") from exc

    def path(self, key: str) -> Path:
        return self.base_dir / Path(self.get(key))

    def finish(self) -> None:
        leftover = sorted(set(self.pairs) - self.consumed)
        if leftover:
            raise RecipeError(f"unknown recipe key(s): {', '.join(leftover)}")


def _series_indices(pairs: dict[str, str]) -> list[int]:
    indices = sorted(
        {int(m.group(1)) for key in pairs if (m := re.match(r"series\.(\d+)\.", key))}
    )
    if not indices:
        raise RecipeError("timeseries recipe declares no series.N.* keys")
    return indices


def _series_color(protocol: str, position: int) -> str:
    if protocol in PROTOCOL_COLORS:
        return PROTOCOL_COLORS[protocol]
    return _FALLBACK_COLORS[position % len(_FALLBACK_COLORS)]


def _apply_labels(ax, recipe: _Recipe) -> None:
    ax.set_xlabel(recipe.get("x.label", ""))
    ax.set_ylabel(recipe.get("y.label", ""))
    title = recipe.get("title", "")
    if title:
        ax.set_title(title)


def _format_value(value: float) -> str:
    return format(value, "g")


# ---------------------------------------------------------------------------
# Figure kinds


def _render_timeseries(recipe: _Recipe, ax) -> None:
    """One curve per series.N block, with a marker at each curve's peak."""
    x_column = recipe.get("x.column", "time")
    mark_peaks = recipe.get("mark_peaks", "true") == "true"
    for position, index in enumerate(_series_indices(recipe.pairs)):
        prefix = f"series.{index}."
        path = recipe.path(prefix + "csv")
        column = recipe.get(prefix + "column")
        protocol = recipe.get(prefix + "protocol", "")
        label = recipe.get(prefix + "label", column)
        table = _read_table(path)
        x = _numeric(table, x_column, path)
        y = _numeric(table, column, path)
        color = _series_color(protocol, position)
        ax.plot(x, y, color=color, label=label, linewidth=1.6)
        if mark_peaks:
            k = int(np.argmax(y))
            ax.plot([x[k]], [y[k]], marker="o", color=color, markersize=5)
    ax.legend(frameon=False)
    _apply_labels(ax, recipe)


def _pivot_grid(
    x: np.ndarray, y: np.ndarray, z: np.ndarray, path: Path
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = np.unique(x)
    ys = np.unique(y)
    grid = np.full((ys.size, xs.size), np.nan)
    grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = z
    if np.isnan(grid).any():
        raise RecipeError(f"{path}: rows do not fill a complete rectangular grid")
    return xs, ys, grid


def _render_contour(recipe: _Recipe, ax) -> None:
    """Filled contours of one CSV column over two coordinate columns."""
    path = recipe.path("csv")
    table = _read_table(path)
    x = _numeric(table, recipe.get("x.column"), path)
    y = _numeric(table, recipe.get("y.column"), path)
    z = _numeric(table, recipe.get("z.column"), path)
    xs, ys, grid = _pivot_grid(x, y, z, path)
    levels = recipe.get_int("levels", "21")
    image = ax.contourf(xs, ys, grid, levels=levels, cmap=recipe.get("colormap", "viridis"))
    ax.figure.colorbar(image, ax=ax, label=recipe.get("z.label", ""))
    _apply_labels(ax, recipe)


def _grouped_rows(
    table: dict[str, list[str]], columns: list[str], path: Path
) -> list[tuple[tuple[str, ...], np.ndarray]]:
    """Row-index masks for each distinct tuple of the grouping columns."""
    keys = list(zip(*(_column(table, name, path) for name in columns)))
    order: list[tuple[str, ...]] = []
    for key in keys:
        if key not in order:
            order.append(key)
    return [(key, np.array([k == key for k in keys])) for key in order]


def _render_errorbar(recipe: _Recipe, ax) -> None:
    """Mean +/- std curves, one per value of the grouping column."""
    path = recipe.path("csv")
    table = _read_table(path)
    x_name = recipe.get("x.column")
    y_name = recipe.get("y.column")
    err_name = recipe.get("yerr.column")
    group_name = recipe.get("group.column", "protocol")
    x = _numeric(table, x_name, path)
    y = _numeric(table, y_name, path)
    err = _numeric(table, err_name, path)
    for position, (key, mask) in enumerate(_grouped_rows(table, [group_name], path)):
        (group_value,) = key
        order = np.argsort(x[mask], kind="stable")
        ax.errorbar(
            x[mask][order],
            y[mask][order],
            yerr=err[mask][order],
            color=_series_color(group_value, position),
            label=group_value,
            linewidth=1.6,
            capsize=3,
        )
    ax.legend(frameon=False)
    _apply_labels(ax, recipe)


def _render_sweep_with_inset(recipe: _Recipe, ax) -> None:
    """Grouped sweep curves plus an inset showing a diagnostic column."""
    path = recipe.path("csv")
    table = _read_table(path)
    x_name = recipe.get("x.column")
    y_name = recipe.get("y.column")
    inset_name = recipe.get("inset.y.column")
    group_names = [
        name.strip() for name in recipe.get("group.columns", "protocol").split(",")
    ]
    x = _numeric(table, x_name, path)
    y = _numeric(table, y_name, path)
    inset_y = _numeric(table, inset_name, path)
    inset_ax = ax.inset_axes((0.52, 0.52, 0.44, 0.42))
    styles: dict[tuple[str, ...], int] = {}
    for position, (key, mask) in enumerate(_grouped_rows(table, group_names, path)):
        rest = key[1:]
        style = _LINESTYLES[styles.setdefault(rest, len(styles)) % len(_LINESTYLES)]
        color = _series_color(key[0], position)
        label = ", ".join(
            f"{name}={value}" if name != group_names[0] else value
            for name, value in zip(group_names, key)
        )
        order = np.argsort(x[mask], kind="stable")
        ax.plot(x[mask][order], y[mask][order], color=color, linestyle=style,
                label=label, linewidth=1.6)
        inset_ax.plot(x[mask][order], inset_y[mask][order], color=color,
                      linestyle=style, linewidth=1.2)
    inset_ax.set_ylabel(recipe.get("inset.y.label", inset_name), fontsize=8)
    inset_ax.tick_params(labelsize=7)
    ax.legend(frameon=False, fontsize=8, loc="lower left")
    _apply_labels(ax, recipe)


def _render_heatmap_grid(recipe: _Recipe, fig) -> None:
    """Grid of heatmap strips: panel rows/columns from two categorical
    columns, each panel colored by the value column along the x column."""
    path = recipe.path("csv")
    table = _read_table(path)
    row_name = recipe.get("row.column", "protocol")
    col_name = recipe.get("col.column")
    x_name = recipe.get("x.column")
    value_name = recipe.get("value.column")
    vmin = recipe.get_float("vmin", "0.0")
    vmax = recipe.get_float("vmax", "1.0")
    colormap = recipe.get("colormap", "viridis")

    rows = _column(table, row_name, path)
    cols = _numeric(table, col_name, path)
    x = _numeric(table, x_name, path)
    values = _numeric(table, value_name, path)
    row_keys = sorted(set(rows))
    col_keys = np.unique(cols)

    axes = fig.subplots(
        len(row_keys), len(col_keys), squeeze=False, sharex="col", sharey=True
    )
    image = None
    for i, row_key in enumerate(row_keys):
        for j, col_key in enumerate(col_keys):
            ax = axes[i][j]
            mask = np.array([r == row_key for r in rows]) & (cols == col_key)
            if not mask.any():
                raise RecipeError(
                    f"{path}: no rows with {row_name}={row_key}, "
                    f"{col_name}={_format_value(col_key)}"
                )
            order = np.argsort(x[mask], kind="stable")
            strip = values[mask][order]
            image = ax.imshow(
                strip[None, :], vmin=vmin, vmax=vmax, cmap=colormap, aspect="auto"
            )
            ax.set_xticks(range(strip.size))
            ax.set_xticklabels([_format_value(v) for v in x[mask][order]], fontsize=8)
            ax.set_yticks([])
            if i == 0:
                ax.set_title(f"{col_name} = {_format_value(col_key)}", fontsize=9)
            if j == 0:
                ax.set_ylabel(row_key)
            if i == len(row_keys) - 1:
                ax.set_xlabel(recipe.get("x.label", x_name))
    fig.colorbar(
        image,
        ax=[ax for row in axes for ax in row],
        label=recipe.get("value.label", value_name),
        shrink=0.85,
    )
    title = recipe.get("title", "")
    if title:
        fig.suptitle(title)
    # consume the shared-but-unused label keys so finish() accepts them
    recipe.get("y.label", "")


_AXIS_RENDERERS: dict[str, Callable[[_Recipe, object], None]] = {
    "timeseries": _render_timeseries,
    "contour": _render_contour,
    "errorbar": _render_errorbar,
    "sweep_with_inset": _render_sweep_with_inset,
}

FIGURE_KINDS = tuple(sorted([*_AXIS_RENDERERS, "heatmap_grid"]))


# ---------------------------------------------------------------------------
# Entry point


def render(recipe_path: str | Path) -> Path:
    """Render the figure described by a recipe file; return the image path."""
    recipe_path = Path(recipe_path)
    recipe = _Recipe(parse_recipe(recipe_path), recipe_path.parent)
    kind = recipe.get("kind")
    if kind not in FIGURE_KINDS:
        raise RecipeError(
            f"unknown figure kind {kind!r} (choose from: {', '.join(FIGURE_KINDS)})"
        )
    output = recipe.path("output")

    plt.rcdefaults()
    if kind == "heatmap_grid":
        fig = plt.figure(figsize=(8.0, 4.0), dpi=_DPI)
        try:
            _render_heatmap_grid(recipe, fig)
            recipe.finish()
            output.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(output, dpi=_DPI, metadata={"Software": None})
        finally:
            plt.close(fig)
        return output

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=_DPI)
    try:
        _AXIS_RENDERERS[kind](recipe, ax)
        recipe.finish()
        fig.tight_layout()
        output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(output, dpi=_DPI, metadata={"Software": None})
    finally:
        plt.close(fig)
    return output
