"""Command-line entry point: ``plot <recipe-file>``."""

from __future__ import annotations

import argparse
import sys

from .recipe import RecipeError
from .render import render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a figure from a recipe file."
    )
    parser.add_argument("recipe", help="path to a key=value recipe file")
    args = parser.parse_args(argv)
    try:
        output = render(args.recipe)
    except RecipeError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and signal failure
        print(f"plot: rendering failed: {exc}", file=sys.stderr)
        return 1
    print(output)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
