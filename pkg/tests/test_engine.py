"""Move codec, trace replay, legality rules, goal classification."""

import random

import pytest

from helpers import random_single_sink_dag

from pebbling.dag import dag_from_preds
from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    IllegalMoveError,
    Trace,
    TraceFormatError,
    _replay_compiled,
    classify_goal,
    classify_trace,
    configs_of,
    flip_moves,
    format_trace,
    parse_trace,
    place,
    region_space,
    remove,
    replay,
    reverse_trace,
    validate_trace,
)
from pebbling.families import pyramid


def diamond():
    return dag_from_preds([(), (0,), (0,), (1, 2)], sink=3)


def test_move_codec():
    assert place(5) >> 1 == 5 and place(5) & 1 == 1
    assert remove(5) >> 1 == 5 and remove(5) & 1 == 0
    assert flip_moves([place(1), remove(2)]) == [place(2), remove(1)]


def test_replay_happy_path_and_stats():
    d = diamond()
    moves = [place(0), place(1), place(2), remove(0), place(3)]
    st = replay(d, moves, STANDARD)
    assert st.space == 3
    assert st.time == 4  # placements only
    assert st.final == 0b1110
    assert st.final_vertices() == frozenset({1, 2, 3})


@pytest.mark.parametrize("flavor,moves,rule,index", [
    (STANDARD, [place(3)], "preds-place", 0),
    (STANDARD, [place(0), place(0)], "occupied", 1),
    (STANDARD, [remove(0)], "absent", 0),
    (REVERSIBLE, [place(0), place(1), remove(0), remove(1)], "preds-remove", 3),
    (STANDARD, [place(9)], "range", 0),
])
def test_replay_illegal_moves(flavor, moves, rule, index):
    d = diamond()
    with pytest.raises(IllegalMoveError) as e:
        replay(d, moves, flavor)
    assert e.value.rule == rule
    assert e.value.index == index
    assert e.value.flavor == flavor


def test_standard_allows_free_removal_reversible_does_not():
    d = diamond()
    moves = [place(0), place(1), remove(0), remove(1)]
    assert replay(d, moves, STANDARD).final == 0
    with pytest.raises(IllegalMoveError) as e:
        replay(d, moves, REVERSIBLE)
    assert e.value.index == 3  # removing 1 needs its predecessor back


def test_region_accounting():
    d = diamond()
    t = Trace(STANDARD, [place(0), place(1), place(2), place(3)])
    assert validate_trace(d, t).space == 4
    assert region_space(d, t, [1, 2]) == 2
    assert region_space(d, t, 1 << 3) == 1
    assert region_space(d, t, []) == 0


def test_classify_goal_kinds():
    d = diamond()
    assert classify_goal(d, 0b1000) == "persistent"
    assert classify_goal(d, 0b1001) == "visiting"
    assert classify_goal(d, 0b0110) == "surrounding"
    assert classify_goal(d, 0b0001) == "other"
    t = Trace(STANDARD, [place(0), place(1), place(2), remove(0), place(3),
                         remove(1), remove(2)])
    assert classify_trace(d, t) == "persistent"


def test_reverse_trace_restores_start():
    d = pyramid(2).graph
    fwd = [place(0), place(1), place(2), place(3), place(4), remove(1),
           place(5)]
    st = replay(d, fwd, REVERSIBLE)
    back = reverse_trace(Trace(REVERSIBLE, fwd))
    st2 = replay(d, back.moves, REVERSIBLE, start=st.final)
    assert st2.final == 0
    assert st2.space == st.space


def test_configs_of_prefix_history():
    d = diamond()
    t = Trace(STANDARD, [place(0), place(1), remove(0)])
    assert configs_of(d, t) == [0b0000, 0b0001, 0b0011, 0b0010]


def test_trace_format_roundtrip_and_errors():
    t = Trace(REVERSIBLE, [place(0), place(2), remove(0)])
    text = format_trace(t)
    t2 = parse_trace(text)
    assert t2.flavor == REVERSIBLE and t2.moves == t.moves
    with pytest.raises(TraceFormatError):
        parse_trace("not a trace\n")
    with pytest.raises(TraceFormatError):
        parse_trace("trace reversible\n*3\n")


def test_trace_rejects_unknown_flavor():
    with pytest.raises(ValueError):
        Trace("magic", [])


def random_legal_moves(d, rng, flavor, steps):
    cfg = 0
    pms = d.pred_masks
    out = []
    for _ in range(steps):
        options = []
        for v in range(d.node_count):
            b = 1 << v
            if cfg & b:
                if flavor == STANDARD or cfg & pms[v] == pms[v]:
                    options.append(remove(v))
            elif cfg & pms[v] == pms[v]:
                options.append(place(v))
        mv = rng.choice(options)
        out.append(mv)
        cfg ^= 1 << (mv >> 1)
    return out


@pytest.mark.parametrize("flavor", [STANDARD, REVERSIBLE])
def test_compiled_replay_agrees_with_python(flavor):
    # same trace through both replay routes, including an illegal suffix
    rng = random.Random(3 if flavor == STANDARD else 4)
    for trial in range(6):
        d = random_single_sink_dag(rng, rng.randrange(4, 10))
        moves = random_legal_moves(d, rng, flavor, 60)
        py = replay(d, moves, flavor)
        ck = _replay_compiled(d, moves, flavor == REVERSIBLE, flavor, 0)
        assert (py.space, py.time, py.final) == (ck.space, ck.time, ck.final)

        bad = moves + [place(moves[-1] >> 1)] if moves[-1] & 1 else moves + [remove(moves[-1] >> 1)]
        with pytest.raises(IllegalMoveError) as e1:
            replay(d, bad, flavor)
        with pytest.raises(IllegalMoveError) as e2:
            _replay_compiled(d, bad, flavor == REVERSIBLE, flavor, 0)
        assert e1.value.rule == e2.value.rule
        assert e1.value.index == e2.value.index


def test_long_trace_uses_kernel_transparently():
    # above the dispatch threshold replay() switches to the compiled kernel;
    # the caller should see identical stats either way
    d = dag_from_preds([(), (0,)], sink=1)
    loop = [place(0), place(1), remove(1), remove(0)]
    moves = loop * 30_000  # 120k moves
    st = replay(d, moves, REVERSIBLE)
    assert st.space == 2
    assert st.time == 60_000
    assert st.final == 0
