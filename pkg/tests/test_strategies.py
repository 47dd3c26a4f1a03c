"""Certified strategy emitters and game callbacks.

Every emitter claim is checked by replaying the emitted trace on the real
graph: legality, exact peak space, and the promised final configuration.
"""

import math

import pytest

from helpers import worst_case_rounds

from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    Trace,
    place,
    replay,
    validate_trace,
)
from pebbling.families import (
    binary_tree,
    christmas_tree,
    mold,
    path,
    pyramid,
    reversible_pyramid_price,
    road,
    teabag,
)
from pebbling.products import product_reversible, product_standard
from pebbling.qbf import EXISTS, FORALL, Qbf, evaluate_sub, gamma
from pebbling.reduction import qbf_reduction
from pebbling.solver import (
    PriceQuery,
    dt_play,
    dt_price,
    extract_optimal_trace,
    price,
)
from pebbling.strategies import (
    StrategyBudgetError,
    dt_challenger_optimal,
    dt_challenger_road,
    dt_pebbler_bisection,
    dt_pebbler_optimal,
    strat_christmas,
    strat_mold,
    strat_path_reversible,
    strat_product_reversible,
    strat_product_standard,
    strat_pyramid_reversible,
    strat_pyramid_standard,
    strat_qbf,
    strat_tree_reversible,
)


def check_persistent(d, t, flavor, want_space):
    st = replay(d, t.moves, flavor)
    assert t.flavor == flavor
    assert st.space == want_space
    assert st.final == 1 << d.require_sink()
    return st


@pytest.mark.parametrize("length", range(13))
def test_path_emitter(length):
    d = path(length).graph
    want = 1 if length == 0 else length.bit_length() + 1
    check_persistent(d, strat_path_reversible(length), REVERSIBLE, want)


@pytest.mark.parametrize("length", range(1, 9))
def test_path_emitter_matches_solver(length):
    d = path(length).graph
    t = strat_path_reversible(length)
    assert validate_trace(d, t).space == price(d, PriceQuery(REVERSIBLE, "persistent"))


@pytest.mark.parametrize("h", range(6))
def test_pyramid_standard_emitter(h):
    d = pyramid(h).graph
    want = 1 if h == 0 else h + 2
    check_persistent(d, strat_pyramid_standard(h), STANDARD, want)


@pytest.mark.parametrize("h", range(6))
def test_pyramid_reversible_emitter(h):
    d = pyramid(h).graph
    check_persistent(d, strat_pyramid_reversible(h), REVERSIBLE,
                     reversible_pyramid_price(h))


@pytest.mark.parametrize("h", range(5))
def test_tree_emitter(h):
    d = binary_tree(h).graph
    check_persistent(d, strat_tree_reversible(h), REVERSIBLE,
                     reversible_pyramid_price(h))


@pytest.mark.parametrize("h", range(4))
def test_tree_emitter_matches_solver(h):
    d = binary_tree(h).graph
    t = strat_tree_reversible(h)
    assert validate_trace(d, t).space == price(d, PriceQuery(REVERSIBLE, "persistent"))


@pytest.mark.parametrize("r", range(1, 7))
def test_christmas_emitter(r):
    d = christmas_tree(r).graph
    check_persistent(d, strat_christmas(r), REVERSIBLE, r)


def test_emitters_are_deterministic():
    assert strat_pyramid_reversible(3).moves == strat_pyramid_reversible(3).moves
    assert strat_christmas(4).moves == strat_christmas(4).moves


@pytest.mark.parametrize("inner", [path(2), pyramid(1), christmas_tree(3)])
def test_mold_emitter(inner):
    inner_trace = extract_optimal_trace(inner.graph, PriceQuery(REVERSIBLE, "persistent"))
    m = mold(inner)
    t = strat_mold(inner, inner_trace)
    st = check_persistent(m.graph, t, REVERSIBLE,
                          validate_trace(inner.graph, inner_trace).space + 2)
    assert st.space == price(m.graph, PriceQuery(REVERSIBLE, "persistent"))


def test_mold_emitter_rejects_non_persistent_inner():
    bad = Trace(REVERSIBLE, [place(0)])  # legal but does not end on {sink}
    with pytest.raises(ValueError):
        strat_mold(pyramid(1), bad)


def test_product_reversible_emitter():
    g1, g2 = path(1), pyramid(1)
    t1 = strat_path_reversible(1)
    t2 = strat_pyramid_reversible(1)
    prod = product_reversible(g1, g2)
    t = strat_product_reversible(g1, t1, g2, t2)
    st = check_persistent(prod.graph, t, REVERSIBLE, 2 + 3 + 1)
    assert st.space == price(prod.graph, PriceQuery(REVERSIBLE, "persistent"))


def test_product_standard_emitter():
    g1 = g2 = pyramid(1)
    t1 = strat_pyramid_standard(1)
    prod = product_standard(g1, g2)
    t = strat_product_standard(g1, t1, g2, t1)
    st = check_persistent(prod.graph, t, STANDARD, 3 + 3 - 1)
    assert st.space == price(prod.graph, PriceQuery(STANDARD, "persistent"))


def test_product_standard_emitter_rejects_reversible_traces():
    g = pyramid(1)
    with pytest.raises(ValueError):
        strat_product_standard(g, strat_pyramid_reversible(1), g,
                               strat_pyramid_standard(1))


# ---------------------------------------------------------------------------
# formula strategies
#
# White-box formulas skip the 3-distinct-variable surface validation so the
# universal/false code paths get exercised at tiny sizes; the reduction and
# the evaluator accept them unchanged.

def make_formula(prefix, clauses) -> Qbf:
    q = object.__new__(Qbf)
    object.__setattr__(q, "prefix", tuple(prefix))
    object.__setattr__(q, "clauses", tuple(clauses))
    return q


FORMULAS = {
    "exists-true": make_formula([(EXISTS, 1)], [(1, 1, 1)]),
    "exists-false-witness": make_formula([(EXISTS, 1)], [(-1, -1, -1)]),
    "forall-false": make_formula([(FORALL, 1)], [(1, 1, 1)]),
    "forall-taut": make_formula([(FORALL, 1)], [(1, -1, 1)]),
    "exists-unsat": make_formula([(EXISTS, 1)], [(1, 1, 1), (-1, -1, -1)]),
    "forall-two-taut": make_formula([(FORALL, 1)], [(1, -1, 1), (-1, 1, -1)]),
    "forall-exists": make_formula([(FORALL, 2), (EXISTS, 1)], [(1, 2, 2)]),
}


@pytest.mark.parametrize("name", sorted(FORMULAS))
def test_qbf_emitter_hits_gamma(name):
    phi = FORMULAS[name]
    res = qbf_reduction(phi)
    want = res.gamma + (0 if evaluate_sub(phi, {}) else 1)
    t = strat_qbf(phi)
    st = replay(res.graph, t.moves, REVERSIBLE)
    assert st.space == want
    assert st.final == 1 << res.graph.require_sink()


def test_qbf_emitter_budget_guard():
    phi = FORMULAS["exists-true"]
    with pytest.raises(StrategyBudgetError):
        strat_qbf(phi, move_budget=10)
    free = strat_qbf(phi)
    # the meter is conservative, so only a roomy cap is guaranteed clean
    capped = strat_qbf(phi, move_budget=4 * len(free.moves))
    assert capped.moves == free.moves


# ---------------------------------------------------------------------------
# game callbacks

def std_trace(d):
    return extract_optimal_trace(d, PriceQuery(STANDARD, "persistent"))


@pytest.mark.parametrize("make", [
    lambda: path(4).graph,
    lambda: pyramid(2).graph,
    lambda: teabag(1, 1).graph,
], ids=["path4", "pyramid2", "teabag1x1"])
def test_bisection_pebbler_round_bound(make):
    d = make()
    t = std_trace(d)
    st = validate_trace(d, t)
    placements = sum(1 for mv in t.moves if mv & 1)
    bound = max(1, st.space * math.ceil(math.log2(max(2, placements))))
    worst = worst_case_rounds(d, lambda: dt_pebbler_bisection(t))
    assert worst <= bound


@pytest.mark.parametrize("make", [
    lambda: pyramid(1).graph,
    lambda: path(3).graph,
    lambda: teabag(1, 1).graph,
    lambda: road(2, 3).graph,
], ids=["pyramid1", "path3", "teabag1x1", "road2x3"])
def test_optimal_pair_achieves_game_value(make):
    d = make()
    t = dt_play(d, dt_pebbler_optimal(d), dt_challenger_optimal(d))
    assert t.rounds == dt_price(d)


def test_optimal_challenger_resists_weak_pebbler():
    d = pyramid(2).graph

    def ascending(d_, gs):
        return next(v for v in range(d_.node_count) if not gs.pebbled >> v & 1)

    t = dt_play(d, ascending, dt_challenger_optimal(d))
    assert t.rounds >= dt_price(d)


@pytest.mark.parametrize("w,length", [(2, 4), (2, 8), (3, 6)])
def test_road_challenger_forces_log_rounds(w, length):
    d = road(w, length).graph
    challenger = lambda: dt_challenger_road(w, length)
    floor = 1 + (w * int(math.log2(length / w))) // 2
    for pebbler in (lambda: dt_pebbler_optimal(d),
                    lambda: dt_pebbler_bisection(std_trace(d))):
        t = dt_play(d, pebbler(), challenger())
        assert t.rounds >= floor


def test_road_challenger_exact_on_small_road():
    d = road(2, 4).graph
    t = dt_play(d, dt_pebbler_optimal(d), dt_challenger_road(2, 4))
    assert t.rounds == 7  # pinned: matches the 2-wide length-4 road game
