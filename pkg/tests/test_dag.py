"""Graph container, serialization, validation, and blocking sets."""

import random

import pytest

from helpers import brute_min_blocking, random_single_sink_dag

from pebbling.dag import (
    CycleError,
    Dag,
    GraphBuilder,
    ancestor_masks,
    ancestors,
    ancestors_of_set,
    bits,
    dag_from_edges,
    dag_from_preds,
    format_anchors,
    format_graph,
    mask_of,
    min_blocking_set,
    parse_anchors,
    parse_graph,
    to_dot,
    validate,
)


def diamond() -> Dag:
    # 0 -> {1, 2} -> 3
    return dag_from_preds([(), (0,), (0,), (1, 2)], sink=3)


def test_mask_helpers_roundtrip():
    m = mask_of([0, 3, 5])
    assert m == 0b101001
    assert list(bits(m)) == [0, 3, 5]
    assert list(bits(0)) == []


def test_preds_succs_topo():
    d = diamond()
    assert d.preds[3] == (1, 2)
    assert d.succs[0] == (1, 2)
    assert d.sinks == (3,)
    order = d.topo_order
    pos = {v: i for i, v in enumerate(order)}
    for v in range(d.node_count):
        for u in d.preds[v]:
            assert pos[u] < pos[v]


def test_dag_from_edges_matches_preds():
    d = dag_from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], sink=3)
    assert d.preds == diamond().preds
    assert d.require_sink() == 3


def test_cycle_detection():
    d = dag_from_preds([(1,), (0,)])
    with pytest.raises(CycleError):
        d.topo_order
    b = GraphBuilder()
    x = b.add()
    y = b.add()
    b.edge(x, y)
    b.edge(y, x)
    with pytest.raises(CycleError):
        b.freeze()


def test_builder_embed_identify():
    inner = diamond()
    b = GraphBuilder()
    root = b.add("root")
    ids = b.embed(inner, identify={0: root})
    assert ids[0] == root
    assert len(set(ids)) == 4
    d = b.freeze(sink=ids[3])
    assert d.node_count == 4
    assert sorted(d.preds[ids[3]]) == sorted([ids[1], ids[2]])


def test_graph_format_parse_roundtrip():
    d = dag_from_preds([(), (0,), (0,), (1, 2)], {3: "top"}, sink=3)
    text = format_graph(d)
    d2 = parse_graph(text)
    assert d2.preds == d.preds
    assert d2.sink == 3
    assert d2.labels.get(3) == "top"


def test_parse_graph_comments_and_errors():
    text = "# hello\ndag 2\nedge 0 1\nsink 1\n"
    d = parse_graph(text)
    assert d.node_count == 2
    with pytest.raises(ValueError):
        parse_graph("dag 2\nedge 0 5\n")
    with pytest.raises(ValueError):
        parse_graph("edge 0 1\n")  # missing header


def test_anchor_roundtrip():
    anchors = {"sink": 3, "mid": 1}
    text = format_anchors(anchors)
    assert parse_anchors(text) == anchors


def test_to_dot_mentions_edges():
    d = diamond()
    dot = to_dot(d, anchors={"sink": 3})
    assert "digraph" in dot
    assert "n0 -> n1;" in dot
    assert "doublecircle" in dot  # sink gets its own shape


def test_validate_single_sink_and_fanin():
    two_sinks = dag_from_preds([(), (0,), (0,)])
    rep = validate(two_sinks, require_single_sink=True)
    assert not rep.ok
    assert "multi-sink" in rep.codes()

    wide = dag_from_preds([(), (), (), (0, 1, 2)], sink=3)
    rep = validate(wide, max_fanin=2)
    assert not rep.ok
    assert "fanin" in rep.codes()
    assert validate(diamond(), require_single_sink=True, max_fanin=2).ok


def test_ancestor_routes_agree():
    rng = random.Random(7)
    for _ in range(20):
        d = random_single_sink_dag(rng, rng.randrange(3, 11))
        masks = ancestor_masks(d)
        for v in range(d.node_count):
            assert masks[v] == mask_of(ancestors(d, v, proper=True))
            assert mask_of(ancestors(d, v)) == masks[v] | 1 << v
        allv = ancestors_of_set(d, range(d.node_count))
        assert allv == frozenset(range(d.node_count))


def test_min_blocking_set_blocks():
    d = diamond()
    cut = min_blocking_set(d, [3])
    assert len(cut) == 1  # 0 or 3 alone cuts the diamond


def test_min_blocking_set_matches_brute_force():
    rng = random.Random(11)
    for _ in range(25):
        d = random_single_sink_dag(rng, rng.randrange(3, 10))
        z = d.require_sink()
        cut = min_blocking_set(d, [z])
        want = brute_min_blocking(d, d.sources_mask, z)
        assert len(cut) == want
        # the returned set really blocks: remove it and search for a path
        todo = [v for v in bits(d.sources_mask) if v not in cut]
        seen = set(todo)
        while todo:
            x = todo.pop()
            assert x != z
            for s in d.succs[x]:
                if s not in seen and s not in cut:
                    seen.add(s)
                    todo.append(s)
