"""Graph families and gadget transforms, plus the height/extra-pebble arithmetic.

Every builder returns a GadgetHandle: the graph, a name->vertex anchor map,
and structural metadata (layer tables, embedded-copy offsets) that strategy
emitters rely on. Id layouts are deterministic and documented per family so
anchors and golden files stay stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

from pebbling.dag import Dag, GraphBuilder, dag_from_preds


@dataclass(frozen=True)
class GadgetHandle:
    graph: Dag
    anchors: dict[str, int] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def anchor(self, name: str) -> int:
        return self.anchors[name]

    @property
    def sink(self) -> int:
        return self.graph.require_sink()


# ---------------------------------------------------------------------------
# height vs extra-pebble arithmetic
#
# max_height(extra) follows the doubly-recursive growth law
#   f(1) = 0,  f(k) = 2^(f(k-1) + k - 2) + f(k-1)
# and gives the tallest pyramid whose reversible persistent pebbling fits in
# height + extra pebbles. extra_pebbles(height) is its inverse. Values explode
# beyond extra = 5 (f(6) has more bits than atoms), so the inverse compares
# bit lengths instead of materializing values.

_MAX_EXACT_EXTRA = 5


def max_height(extra: int) -> int:
    """Tallest pyramid height coverable with the given extra pebbles."""
    if extra < 1:
        raise ValueError("extra must be >= 1")
    if extra > _MAX_EXACT_EXTRA:
        raise ValueError(
            f"value for extra={extra} is astronomically large; "
            f"only extra <= {_MAX_EXACT_EXTRA} is representable")
    val = 0
    for k in range(2, extra + 1):
        val = (1 << (val + k - 2)) + val
    return val


def extra_pebbles(height: int) -> int:
    """Least extra so that max_height(extra) >= height; never overflows."""
    if height < 0:
        raise ValueError("height must be >= 0")
    val = 0  # max_height(1)
    for k in count(2):
        if val >= height:
            return k - 1
        exp = val + k - 2
        # 2^exp alone already exceeds height once exp reaches its bit length
        if exp >= height.bit_length():
            return k
        val = (1 << exp) + val


def reversible_pyramid_price(h: int) -> int:
    """Exact reversible persistent price of pyramid(h) and binary_tree(h)."""
    return h + extra_pebbles(h)


# ---------------------------------------------------------------------------
# basic families

def path(length: int) -> GadgetHandle:
    """Path with `length` edges: ids 0 (source) .. length (sink)."""
    if length < 0:
        raise ValueError("length must be >= 0")
    preds = [()] + [(i - 1,) for i in range(1, length + 1)]
    g = dag_from_preds(preds, sink=length)
    return GadgetHandle(g, {"source": 0, "sink": length}, {"length": length})


def chain(w: int, length: int) -> GadgetHandle:
    """Layers 0..length of width w; id of (layer i, pos j) = i*w + j.

    Vertex (i, j) has predecessors (i-1, j) and (i-1, j+1 mod w). The top
    layer's w vertices are all sinks, so the handle carries no single sink.
    """
    if w < 1 or length < 0:
        raise ValueError("need w >= 1 and length >= 0")
    preds: list[tuple[int, ...]] = []
    for i in range(length + 1):
        for j in range(w):
            if i == 0:
                preds.append(())
            else:
                below = (i - 1) * w
                preds.append(tuple(sorted({below + j, below + (j + 1) % w})))
    g = dag_from_preds(preds)
    layers = [[i * w + j for j in range(w)] for i in range(length + 1)]
    return GadgetHandle(g, {}, {"w": w, "length": length, "layers": layers})


def road(w: int, length: int) -> GadgetHandle:
    """Chain capped to a single sink: the subgraph of chain(w, length) induced
    on the ancestors of top-layer vertex (length, 0), relabeled by (layer, pos).

    Layers 0..length-w+1 keep width w; above that the width shrinks by one per
    layer down to the lone sink, forming a pyramid cap.
    """
    if w < 1 or length < w - 1:
        raise ValueError("need w >= 1 and length >= w - 1")
    base = chain(w, length)
    keep: list[tuple[int, int]] = []  # (layer, pos) kept, in layer-major order
    for i in range(length + 1):
        width = min(w, length - i + 1)
        keep.extend((i, j) for j in range(width))
    ids = {lp: k for k, lp in enumerate(keep)}
    preds: list[tuple[int, ...]] = []
    for i, j in keep:
        if i == 0:
            preds.append(())
        else:
            ps = {(i - 1, j), (i - 1, (j + 1) % w)}
            preds.append(tuple(sorted(ids[p] for p in ps if p in ids)))
    sink = ids[(length, 0)]
    g = dag_from_preds(preds, sink=sink)
    layers: list[list[int]] = []
    for i, j in keep:
        if i == len(layers):
            layers.append([])
        layers[i].append(ids[(i, j)])
    meta = {"w": w, "length": length, "layers": layers,
            "layer_of": [i for i, _ in keep]}
    return GadgetHandle(g, {"sink": sink}, meta)


def pyramid(h: int) -> GadgetHandle:
    """Rows 0 (bottom, h+1 wide) .. h (apex); (row r, pos k) has predecessors
    (r-1, k) and (r-1, k+1). Ids are row-major from the bottom row."""
    if h < 0:
        raise ValueError("height must be >= 0")
    offs = []
    total = 0
    for r in range(h + 1):
        offs.append(total)
        total += h + 1 - r
    preds: list[tuple[int, ...]] = []
    for r in range(h + 1):
        for k in range(h + 1 - r):
            if r == 0:
                preds.append(())
            else:
                below = offs[r - 1]
                preds.append((below + k, below + k + 1))
    sink = offs[h]
    g = dag_from_preds(preds, sink=sink)
    rows = [[offs[r] + k for k in range(h + 1 - r)] for r in range(h + 1)]
    return GadgetHandle(g, {"sink": sink}, {"h": h, "rows": rows})


def binary_tree(h: int) -> GadgetHandle:
    """Complete binary in-tree of height h with heap ids: vertex 0 is the
    sink and vertex x > 0 feeds its parent (x-1)//2; internal vertices have
    predecessors 2x+1 and 2x+2."""
    if h < 0:
        raise ValueError("height must be >= 0")
    n = (1 << (h + 1)) - 1
    internal = (1 << h) - 1
    preds = [
        (2 * x + 1, 2 * x + 2) if x < internal else () for x in range(n)
    ]
    g = dag_from_preds(preds, sink=0)
    return GadgetHandle(g, {"sink": 0}, {"h": h})


def teabag(h: int, tail: int) -> GadgetHandle:
    """pyramid(h) with a path of `tail` edges hung off the apex; the path's
    vertices take ids after the pyramid's, and the last one is the sink."""
    if h < 0 or tail < 0:
        raise ValueError("need h >= 0 and tail >= 0")
    pyr = pyramid(h)
    b = GraphBuilder()
    ids = b.embed(pyr.graph)
    prev = ids[pyr.sink]
    tail_ids = [prev]
    for _ in range(tail):
        v = b.add()
        b.edge(prev, v)
        prev = v
        tail_ids.append(v)
    g = b.freeze(sink=prev)
    meta = {"h": h, "tail": tail, "apex": ids[pyr.sink], "tail_ids": tail_ids,
            "rows": pyr.meta["rows"]}
    return GadgetHandle(g, {"sink": prev, "apex": ids[pyr.sink]}, meta)


def centipede(length: int) -> GadgetHandle:
    """Path 0..length (spine) where spine vertex i >= 1 has an extra private
    source with id length + i; 2*length + 1 vertices total."""
    if length < 0:
        raise ValueError("length must be >= 0")
    preds: list[tuple[int, ...]] = [()]
    for i in range(1, length + 1):
        preds.append((i - 1, length + i))
    preds.extend(() for _ in range(length))
    g = dag_from_preds(preds, sink=length)
    spine = list(range(length + 1))
    extras = [length + i for i in range(1, length + 1)]
    return GadgetHandle(
        g,
        {"spine_start": 0, "sink": length},
        {"length": length, "spine": spine, "extras": extras},
    )


# ---------------------------------------------------------------------------
# graphs with a prescribed reversible persistent price

def fixed_price_graph(p: int) -> GadgetHandle:
    """A graph whose reversible persistent price is exactly p: a pyramid when
    p = h + extra_pebbles(h) for some h, otherwise the previous pyramid with a
    one-edge tail (price one higher than the pyramid alone)."""
    if p < 1:
        raise ValueError("price must be >= 1")
    h = 0
    while True:
        v = h + extra_pebbles(h)
        if v == p:
            out = pyramid(h)
            meta = dict(out.meta, kind="pyramid", price=p)
            return GadgetHandle(out.graph, out.anchors, meta)
        if v > p:
            out = teabag(h - 1, 1)
            meta = dict(out.meta, kind="teabag", price=p)
            return GadgetHandle(out.graph, out.anchors, meta)
        h += 1


# Alias under the family's historical name: pyramids patched to hit every
# price on the nose, not just the prices pyramids reach by themselves.
modified_pyramid = fixed_price_graph


def christmas_tree(r: int) -> GadgetHandle:
    """Stack of fixed-price graphs with both visiting and persistent price r.

    Layer t for t = 1..r-1 is a copy of fixed_price_graph(r-t); layer r is a
    single vertex (the sink). The sink of layer t feeds every source of layers
    t+1 and t+2. Sources of each copy end up with fan-in exactly 2 except in
    the first couple of layers, so the whole graph keeps fan-in <= 2.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    b = GraphBuilder()
    layers = []  # per layer: {"ids", "sink", "sources", "price", "inner"}
    for t in range(1, r + 1):
        inner = fixed_price_graph(r - t) if t < r else None
        if inner is None:
            v = b.add()
            ids = [v]
            sink = v
            sources = [v]
            price_t = 1
        else:
            ids = b.embed(inner.graph)
            sink = ids[inner.sink]
            sources = [ids[v] for v in range(inner.graph.node_count)
                       if not inner.graph.preds[v]]
            price_t = inner.meta["price"]
        for back in (1, 2):
            if len(layers) >= back:
                below = layers[-back]["sink"]
                for src in sources:
                    b.edge(below, src)
        layers.append({"ids": ids, "sink": sink, "sources": sources,
                       "price": price_t, "inner": inner})
    g = b.freeze(sink=layers[-1]["sink"])
    return GadgetHandle(g, {"sink": layers[-1]["sink"]}, {"r": r, "layers": layers})


# ---------------------------------------------------------------------------
# vertex-splitting transforms

def mold(inner: GadgetHandle) -> GadgetHandle:
    """Split every vertex v into v_in (id 2v) -> v_out (id 2v+1), rewire each
    edge (u, v) as u_out -> v_in, and add one universal source s (id 2n) with
    an edge to every v_out. The sink is the old sink's v_out."""
    g = inner.graph
    n = g.node_count
    s = 2 * n
    preds: list[tuple[int, ...]] = []
    for v in range(n):
        preds.append(tuple(sorted(2 * u + 1 for u in g.preds[v])))  # v_in
        preds.append((2 * v, s))  # v_out
    preds.append(())  # s
    sink = 2 * g.require_sink() + 1
    out = dag_from_preds(preds, sink=sink)
    meta = {"inner": inner, "source": s}
    return GadgetHandle(out, {"s": s, "sink": sink}, meta)


def turnpike(toll: int) -> GadgetHandle:
    """Entrance/exit pair that costs toll+2 pebbles to cross while the
    entrance is counted (toll+1 when it is free). Toll 0 is a bare edge
    a -> b; toll r > 0 is mold(christmas_tree(r)) with a = the universal
    source and b = the molded sink."""
    if toll < 0:
        raise ValueError("toll must be >= 0")
    if toll == 0:
        g = dag_from_preds([(), (0,)], sink=1)
        return GadgetHandle(g, {"a": 0, "b": 1}, {"toll": 0})
    inner = christmas_tree(toll)
    m = mold(inner)
    anchors = {"a": m.anchors["s"], "b": m.anchors["sink"]}
    meta = {"toll": toll, "inner": inner, "source": m.anchors["s"]}
    return GadgetHandle(m.graph, anchors, meta)


# ---------------------------------------------------------------------------
# registry used by the CLI and the test corpus

FAMILY_ARITIES = {
    "path": 1,
    "chain": 2,
    "road": 2,
    "pyramid": 1,
    "tree": 1,
    "teabag": 2,
    "centipede": 1,
    "gpyr": 1,
    "xmas": 1,
    "turnpike": 1,
}


def build_family(name: str, params: list[int]) -> GadgetHandle:
    builders = {
        "path": path,
        "chain": chain,
        "road": road,
        "pyramid": pyramid,
        "tree": binary_tree,
        "teabag": teabag,
        "centipede": centipede,
        "gpyr": fixed_price_graph,
        "xmas": christmas_tree,
        "turnpike": turnpike,
    }
    if name not in builders:
        raise ValueError(f"unknown family {name!r}")
    if len(params) != FAMILY_ARITIES[name]:
        raise ValueError(
            f"family {name} takes {FAMILY_ARITIES[name]} parameter(s)")
    return builders[name](*params)
