"""Price-additive graph products.

Two block-replacement products over single-sink, fan-in-<=2 DAGs:

* product_reversible: every factor-pair (v1, v2) becomes a three-node cell
  (exterior, interior, output). Reversible persistent price of the product is
  price(g1) + price(g2) + 1.
* product_standard: every vertex of g1 becomes a copy of g2 extended with a
  guarded tail (pointy), wired tip-to-tail-sources along g1's edges. Standard
  price of the product is price(g1) + price(g2) - 1, provided the inner
  factor's standard price is at least 3.

Id layouts are pure functions of the factor sizes so strategy emitters can
address product nodes without carrying tables around.
"""

from __future__ import annotations

from pebbling.dag import Dag, ancestors, dag_from_preds
from pebbling.families import GadgetHandle


def _as_dag(g: Dag | GadgetHandle) -> Dag:
    return g.graph if isinstance(g, GadgetHandle) else g


def _lab(d: Dag, v: int) -> str:
    return d.labels.get(v, str(v))


def _check_factor(d: Dag, which: str) -> int:
    """Return the unique sink of a factor or raise."""
    if d.sink is None:
        raise ValueError(f"{which} factor has no designated sink")
    if d.sinks != (d.sink,):
        raise ValueError(
            f"{which} factor must have a unique sink; found sinks {list(d.sinks)}")
    if any(len(p) > 2 for p in d.preds):
        raise ValueError(f"{which} factor has a vertex with fan-in > 2")
    return d.sink


# ---------------------------------------------------------------------------
# reversible-flavor product

def reversible_cell_ids(n_inner: int, v1: int, v2: int) -> tuple[int, int, int]:
    """(exterior, interior, output) ids of the (v1, v2) cell.

    Cells are laid out pair-major: the (v1, v2) cell occupies three
    consecutive ids starting at 3 * (v1 * n_inner + v2).
    """
    base = 3 * (v1 * n_inner + v2)
    return base, base + 1, base + 2


def product_reversible(g1: Dag | GadgetHandle, g2: Dag | GadgetHandle) -> GadgetHandle:
    """Cell-expansion product; reversible persistent price p1 + p2 + 1.

    Each cell's output node is fed by its exterior and interior nodes. The
    exterior node mirrors g1: it is fed by the output of the sink cell of
    every predecessor block. The interior node mirrors g2: it is fed by the
    outputs of the predecessor cells inside its own block. Sink = the output
    node of the (sink1, sink2) cell.
    """
    d1, d2 = _as_dag(g1), _as_dag(g2)
    z1 = _check_factor(d1, "outer")
    z2 = _check_factor(d2, "inner")
    n1, n2 = d1.node_count, d2.node_count

    preds: list[tuple[int, ...]] = [()] * (3 * n1 * n2)
    labels: dict[int, str] = {}
    for v1 in range(n1):
        for v2 in range(n2):
            ext, itr, out = reversible_cell_ids(n2, v1, v2)
            preds[ext] = tuple(
                sorted(reversible_cell_ids(n2, w1, z2)[2] for w1 in d1.preds[v1]))
            preds[itr] = tuple(
                sorted(reversible_cell_ids(n2, v1, w2)[2] for w2 in d2.preds[v2]))
            preds[out] = (ext, itr)
            tag = f"{_lab(d1, v1)}|{_lab(d2, v2)}"
            labels[ext] = f"{tag}.ext"
            labels[itr] = f"{tag}.int"
            labels[out] = f"{tag}.out"

    sink = reversible_cell_ids(n2, z1, z2)[2]
    g = dag_from_preds(preds, labels, sink=sink)
    meta = {
        "n1": n1,
        "n2": n2,
        "factors": (d1, d2),
        "price_law": "persistent(g1) + persistent(g2) + 1",
    }
    return GadgetHandle(g, {"sink": sink}, meta)


# ---------------------------------------------------------------------------
# standard-flavor product

def pointy(g: Dag | GadgetHandle, tail: int) -> GadgetHandle:
    """g with a length-`tail` guarded path hung off its sink.

    Spine vertex i (1-based) follows spine vertex i-1 (the sink of g for
    i = 1) and a private extra source; crossing the whole tail with the sink
    of g pebbled costs 3 pebbles, so the standard price is max(3, price(g)).
    Ids: g keeps 0..n-1; extra_i = n + 2(i-1), spine_i = n + 2(i-1) + 1.
    """
    d = _as_dag(g)
    z = _check_factor(d, "inner")
    if tail < 1:
        raise ValueError("tail must be >= 1")
    n = d.node_count
    preds = list(d.preds)
    labels = dict(d.labels)
    prev = z
    for i in range(1, tail + 1):
        extra = n + 2 * (i - 1)
        spine = extra + 1
        preds.append(())
        preds.append((prev, extra))
        labels[extra] = f"tail.extra{i}"
        labels[spine] = f"tail.spine{i}"
        prev = spine
    out = dag_from_preds(preds, labels, sink=prev)
    meta = {
        "inner": d,
        "tail": tail,
        "spine": [z] + [n + 2 * i + 1 for i in range(tail)],
        "extras": [n + 2 * i for i in range(tail)],
    }
    return GadgetHandle(out, {"sink": prev, "inner_sink": z}, meta)


def standard_block_layout(n1: int, n2: int, v1: int) -> dict:
    """Id layout of the v1-block of a standard product with factor sizes
    n1, n2: inner copy at base..base+n2-1, then alternating tail extras and
    spine vertices; the block's tip (its local sink) is the last spine id.
    """
    base = v1 * (n2 + 2 * n1)
    extras = [base + n2 + 2 * i for i in range(n1)]
    spine = [base + n2 + 2 * i + 1 for i in range(n1)]
    return {"base": base, "extras": extras, "spine": spine, "tip": spine[-1]}


def standard_price_at_least_3(g: Dag | GadgetHandle) -> bool:
    """Cheap exact test: standard price >= 3 iff some ancestor of the sink
    (or the sink itself) has two predecessors; otherwise the sink's ancestry
    is a bare path and two pebbles suffice."""
    d = _as_dag(g)
    return any(len(d.preds[v]) == 2 for v in ancestors(d, d.require_sink()))


def product_standard(g1: Dag | GadgetHandle, g2: Dag | GadgetHandle) -> GadgetHandle:
    """Block-replacement product; standard price p1 + p2 - 1 when the inner
    factor's standard price is at least 3.

    Every vertex of g1 becomes a block: a copy of g2 with a guarded tail of
    length |g1| (see pointy). For every edge (u1, v1) of g1, the tip of the
    u1-block feeds every tail extra source of the v1-block. Sink = the tip of
    the sink block.

    If the inner factor's standard price is below 3 the construction is still
    emitted, but the handle withholds the price law (meta["claims_price_law"]
    is False and meta["warnings"] says why).
    """
    d1, d2 = _as_dag(g1), _as_dag(g2)
    z1 = _check_factor(d1, "outer")
    _check_factor(d2, "inner")
    n1, n2 = d1.node_count, d2.node_count
    block = n2 + 2 * n1

    preds: list[tuple[int, ...]] = []
    labels: dict[int, str] = {}
    for v1 in range(n1):
        lay = standard_block_layout(n1, n2, v1)
        base = lay["base"]
        feeders = tuple(
            sorted(standard_block_layout(n1, n2, u1)["tip"] for u1 in d1.preds[v1]))
        for v2 in range(n2):
            preds.append(tuple(base + u2 for u2 in d2.preds[v2]))
            labels[base + v2] = f"{_lab(d1, v1)}|{_lab(d2, v2)}"
        prev = base + d2.require_sink()
        for i in range(n1):
            preds.append(feeders)
            preds.append((prev, lay["extras"][i]))
            labels[lay["extras"][i]] = f"{_lab(d1, v1)}|tail.extra{i + 1}"
            labels[lay["spine"][i]] = f"{_lab(d1, v1)}|tail.spine{i + 1}"
            prev = lay["spine"][i]

    sink = standard_block_layout(n1, n2, z1)["tip"]
    g = dag_from_preds(preds, labels, sink=sink)
    hypothesis_ok = standard_price_at_least_3(d2)
    meta = {
        "n1": n1,
        "n2": n2,
        "block_size": block,
        "factors": (d1, d2),
        "claims_price_law": hypothesis_ok,
        "price_law": "standard(g1) + standard(g2) - 1" if hypothesis_ok else None,
        "warnings": [] if hypothesis_ok else [
            "inner factor has standard price < 3; the price law is withheld"],
    }
    return GadgetHandle(g, {"sink": sink}, meta)
