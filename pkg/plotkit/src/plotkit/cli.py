"""`plot <kind> --in DIR --out FILE.png` — batch figure rendering."""

from __future__ import annotations

import argparse
import sys

from .figures import AbortedInputError, FigureJob, KINDS, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="input_dir", required=True)
    parser.add_argument("--out", dest="output_path", required=True)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    job = FigureJob(input_dir=args.input_dir, kind=args.kind,
                    output_path=args.output_path)
    try:
        path = render(job)
    except (AbortedInputError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
