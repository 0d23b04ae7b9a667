"""Script entry point: render one figure from a FigureSpec JSON file.

Exit codes: 0 success, 1 input-schema mismatch, 2 invalid spec.
"""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaMismatch, SpecError, load_spec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pclplots",
        description="Render figures from simulator metrics.csv / summary.json",
    )
    parser.add_argument("--spec", required=True, help="FigureSpec JSON file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        out = render(spec)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
