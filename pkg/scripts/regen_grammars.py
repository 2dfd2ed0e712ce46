#!/usr/bin/env python3
"""Regenerate the shipped .peg sources from the catalog constructors.

The catalog defines every study grammar programmatically; this script
renders each one with ``format_grammar`` and writes it to
``src/pegkit/grammars/<name>.peg`` so the textual form never drifts from
the constructors.  Run with ``--check`` to verify the files are current
without rewriting them (non-zero exit on drift).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pegkit import format_grammar, registry

GRAMMAR_DIR = Path(__file__).resolve().parent.parent / "src" / "pegkit" / "grammars"


def render_entry(name: str, description: str, grammar) -> str:
    header = f"# {name}: {description}\n" if description else f"# {name}\n"
    return header + format_grammar(grammar)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--check",
        action="store_true",
        help="verify the files match the constructors instead of writing",
    )
    args = parser.parse_args(argv)

    GRAMMAR_DIR.mkdir(parents=True, exist_ok=True)
    stale = []
    for name, entry in sorted(registry().items()):
        text = render_entry(name, entry.description, entry.grammar)
        path = GRAMMAR_DIR / f"{name}.peg"
        current = path.read_text(encoding="utf-8") if path.exists() else None
        if args.check:
            if current != text:
                stale.append(name)
                print(f"stale: {path}")
            continue
        if current != text:
            path.write_text(text, encoding="utf-8", newline="\n")
            print(f"wrote {path}")
        else:
            print(f"up to date: {path}")

    if args.check:
        if stale:
            print(f"{len(stale)} grammar file(s) out of date; rerun without --check")
            return 1
        print(f"all {len(registry())} grammar files up to date")
    return 0


if __name__ == "__main__":
    sys.exit(main())
