#!/usr/bin/env python3
"""Emit every figure dataset as CSV into an output directory.

Equivalent to running `dwelltime figure <name> <out>` for each known name.
"""

import argparse
import pathlib
import sys

from dwelltime.cli import FIGURES, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures", help="directory for the CSV files")
    ap.add_argument("names", nargs="*", default=None,
                    help=f"subset of figures (default: all of {sorted(FIGURES)})")
    args = ap.parse_args()

    names = args.names or sorted(FIGURES)
    unknown = [n for n in names if n not in FIGURES]
    if unknown:
        ap.error(f"unknown figure names {unknown}; choose from {sorted(FIGURES)}")

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        comments, header, rows = FIGURES[name]()
        path = out_dir / f"{name}.csv"
        write_csv(str(path), comments, header, rows)
        print(f"{path}: {len(rows)} rows x {len(header)} columns")
    return 0


if __name__ == "__main__":
    sys.exit(main())
