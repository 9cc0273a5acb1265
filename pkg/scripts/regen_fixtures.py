"""Recompute the oracle values and measured constants and rewrite the package fixtures.

Usage: python scripts/regen_fixtures.py [--tol 1e-9] [--output PATH]
"""

import argparse
import sys

from affwave.oracles import build_oracle_fixtures, fixtures_path, write_fixtures
from affwave.verify import measure_constants


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--output", default=None)
    args = ap.parse_args(argv)
    items = build_oracle_fixtures(args.tol)
    print(f"{len(items)} oracle values")
    items += measure_constants()
    path = write_fixtures(items, args.output or fixtures_path())
    print(f"wrote {len(items)} fixtures to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
