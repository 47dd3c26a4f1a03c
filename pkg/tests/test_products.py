"""Graph products: layouts, factor checks, and price additivity on tiny pairs."""

import pytest

from pebbling.dag import dag_from_preds, validate
from pebbling.engine import REVERSIBLE, STANDARD
from pebbling.families import chain, path, pyramid
from pebbling.products import (
    pointy,
    product_reversible,
    product_standard,
    reversible_cell_ids,
    standard_block_layout,
    standard_price_at_least_3,
)
from pebbling.solver import PriceQuery, price


def test_reversible_cell_ids_cover_everything():
    n1, n2 = 3, 4
    seen = set()
    for v1 in range(n1):
        for v2 in range(n2):
            seen.update(reversible_cell_ids(n2, v1, v2))
    assert seen == set(range(3 * n1 * n2))


def test_standard_block_layout_disjoint():
    n1, n2 = 3, 4
    seen = set()
    for v1 in range(n1):
        lay = standard_block_layout(n1, n2, v1)
        ids = set(range(lay["base"], lay["base"] + n2)) | set(lay["extras"]) | set(lay["spine"])
        assert lay["tip"] == lay["spine"][-1]
        assert not ids & seen
        seen |= ids
    assert seen == set(range(n1 * (n2 + 2 * n1)))


def test_factor_checks():
    no_sink = chain(2, 1).graph
    with pytest.raises(ValueError):
        product_reversible(no_sink, path(1))
    wide = dag_from_preds([(), (), (), (0, 1, 2)], sink=3)
    with pytest.raises(ValueError):
        product_reversible(path(1), wide)
    with pytest.raises(ValueError):
        product_standard(wide, path(2))


def test_reversible_product_shape():
    h = product_reversible(path(1), path(1))
    d = h.graph
    assert d.node_count == 12
    assert validate(d, require_single_sink=True, max_fanin=2).ok
    ext, itr, out = reversible_cell_ids(2, 1, 1)
    assert d.preds[out] == (ext, itr)
    assert d.require_sink() == out


def test_reversible_product_price_additive():
    p = price(product_reversible(path(1), path(1)).graph,
              PriceQuery(REVERSIBLE, "persistent"))
    assert p == 2 + 2 + 1


def test_pointy_tail():
    h = pointy(pyramid(1), 2)
    d = h.graph
    assert d.node_count == 3 + 4
    assert d.require_sink() == h.meta["spine"][-1]
    assert price(d, PriceQuery(STANDARD, "persistent")) == 3


def test_standard_price_at_least_3_oracle():
    assert not standard_price_at_least_3(path(5))
    assert standard_price_at_least_3(pyramid(1))
    # matches the solver on a handful of small graphs
    for h in (path(3), pyramid(1), pyramid(2), chain(1, 2)):
        d = h.graph
        if d.sink is None:
            continue
        got = price(d, PriceQuery(STANDARD, "persistent")) >= 3
        assert standard_price_at_least_3(d) == got


def test_standard_product_shape_and_price():
    h = product_standard(pyramid(1), pyramid(1))
    d = h.graph
    assert d.node_count == 3 * (3 + 2 * 3)
    assert validate(d, require_single_sink=True).ok
    assert h.meta["claims_price_law"]
    assert price(d, PriceQuery(STANDARD, "persistent")) == 3 + 3 - 1


def test_standard_product_withholds_law_for_cheap_inner():
    h = product_standard(pyramid(1), path(2))
    assert not h.meta["claims_price_law"]
    assert h.meta["warnings"]
