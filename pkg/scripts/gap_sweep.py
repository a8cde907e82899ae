#!/usr/bin/env python3
"""Sweep Schreier-graph spectral gaps for the degree-6 generating triple
over a range of primes and write the CSV.

Usage: python scripts/gap_sweep.py [--pmax 31] [--out gaps.csv]
"""

import argparse
import sys

from tamexp.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pmax", type=int, default=31)
    ap.add_argument("--variant", choices=["i", "ii"], default="i")
    ap.add_argument("--out", default="gaps.csv")
    args = ap.parse_args()
    return cli_main(["gap", "--thm15", args.variant, "--p", str(args.pmax),
                     "--sweep", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
