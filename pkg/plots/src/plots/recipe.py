"""Recipe files: ``key=value`` lines with ``#`` comments and blank lines."""

from __future__ import annotations

from pathlib import Path


class RecipeError(ValueError):
    """A recipe file is malformed or inconsistent with its input CSVs."""


def parse_recipe(path: str | Path) -> dict[str, str]:
    """Parse a recipe file into a flat key -> value mapping.

    Blank lines and lines starting with ``#`` are ignored.  Every other
    line must be ``key=value``; duplicate keys are an error.  No schema is
    applied here — the renderer for the recipe's figure kind validates the
    keys it consumes and rejects leftovers.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RecipeError(f"cannot read recipe {path}: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise RecipeError(f"{path}, line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise RecipeError(f"{path}, line {lineno}: empty key")
        if key in pairs:
            raise RecipeError(f"{path}, line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs
