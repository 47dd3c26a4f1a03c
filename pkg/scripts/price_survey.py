"""Survey exact pebbling prices across the built-in graph families.

Usage: python3 scripts/price_survey.py [--max-n 14] [--game]
"""

import argparse

from pebbling.engine import REVERSIBLE, STANDARD
from pebbling.families import (
    binary_tree,
    centipede,
    christmas_tree,
    path,
    pyramid,
    road,
    teabag,
    turnpike,
)
from pebbling.solver import PriceQuery, dt_price, price


def survey(max_n: int):
    out = []
    out += [(f"path({k})", path(k).graph) for k in range(1, 7)]
    out += [(f"pyramid({h})", pyramid(h).graph) for h in range(4)]
    out += [(f"tree({h})", binary_tree(h).graph) for h in range(4)]
    out += [(f"road(2,{k})", road(2, k).graph) for k in (2, 4)]
    out += [(f"teabag({h},{k})", teabag(h, k).graph) for h, k in ((1, 1), (2, 2))]
    out += [(f"centipede({k})", centipede(k).graph) for k in (2, 4)]
    out += [(f"xmas({r})", christmas_tree(r).graph) for r in (2, 3)]
    out += [(f"turnpike({r})", turnpike(r).graph) for r in (1, 2)]
    return [(name, d) for name, d in out if d.node_count <= max_n]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=14,
                    help="skip graphs with more vertices than this")
    ap.add_argument("--game", action="store_true",
                    help="also compute the Pebbler/Challenger game value")
    args = ap.parse_args()

    cols = "graph n standard reversible surround".split()
    if args.game:
        cols.append("game")
    print("  ".join(f"{c:>11}" for c in cols))
    for name, d in survey(args.max_n):
        row = [name, d.node_count,
               price(d, PriceQuery(STANDARD, "persistent")),
               price(d, PriceQuery(REVERSIBLE, "persistent")),
               price(d, PriceQuery(REVERSIBLE, "surrounding"))]
        if args.game:
            row.append(dt_price(d))
        print("  ".join(f"{c!s:>11}" for c in row))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
