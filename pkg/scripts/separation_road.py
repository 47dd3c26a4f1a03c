"""Show the standard/reversible gap growing along road graphs.

Standard pebbling crosses road(w, l) with w+2 pebbles no matter how
long the road is; reversible pebbling cannot discard its trail and
pays an extra pebble every time the length doubles.

Usage: python3 scripts/separation_road.py [--width 2] [--max-length 16]
"""

import argparse
import time

from pebbling.engine import REVERSIBLE, STANDARD
from pebbling.families import road
from pebbling.solver import PriceQuery, price


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=int, default=2)
    ap.add_argument("--max-length", type=int, default=16,
                    help="lengths sweep powers of two up to this")
    args = ap.parse_args()

    w = args.width
    print(f"{'length':>7} {'n':>4} {'standard':>9} {'reversible':>11} {'secs':>6}")
    length = w
    while length <= args.max_length:
        d = road(w, length).graph
        t0 = time.monotonic()
        std = price(d, PriceQuery(STANDARD, "persistent"))
        rev = price(d, PriceQuery(REVERSIBLE, "persistent"))
        dt = time.monotonic() - t0
        print(f"{length:>7} {d.node_count:>4} {std:>9} {rev:>11} {dt:>6.1f}")
        length *= 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
