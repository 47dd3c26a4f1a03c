"""QDIMACS parsing, formula evaluation, and the price ledger."""

import itertools
import json
import random

import pytest

from pebbling.qbf import (
    EXISTS,
    FORALL,
    GammaLedger,
    Qbf,
    QbfFormatError,
    evaluate,
    evaluate_sub,
    gamma,
    parse_qdimacs,
)

GOOD = """\
c a closed prenex 3-cnf formula
p cnf 3 2
a 3 0
e 2 0
a 1 0
1 2 3 0
-1 2 -3 0
"""


def test_parse_good_file():
    q = parse_qdimacs(GOOD)
    assert q.prefix == ((FORALL, 3), (EXISTS, 2), (FORALL, 1))
    assert q.clauses == ((1, 2, 3), (-1, 2, -3))
    assert q.n == 3 and q.m == 2
    assert q.variables == (3, 2, 1)


def test_parse_clause_spanning_lines():
    q = parse_qdimacs("p cnf 3 1\ne 1 2 3 0\n1 2\n3 0\n")
    assert q.clauses == ((1, 2, 3),)


@pytest.mark.parametrize("text,rule", [
    ("p cnf 3 1\ne 1 2 3 0\n1 2 3 zero\n", "syntax"),
    ("p cnf 3 1\ne 1 2 3 0\n1 2 3\n", "syntax"),  # missing terminating 0
    ("p cnf 3 1\ne 1 2 3\n1 2 3 0\n", "syntax"),  # quantifier line without 0
    ("e 1 2 3 0\n1 2 3 0\n", "header"),
    ("p cnf 3 1\np cnf 3 1\ne 1 2 3 0\n1 2 3 0\n", "header"),
    ("p dnf 3 1\ne 1 2 3 0\n1 2 3 0\n", "header"),
    ("p cnf 3 2\ne 1 2 3 0\n1 2 3 0\n", "header"),  # clause count mismatch
    ("p cnf 2 1\ne 1 2 3 0\n1 2 3 0\n", "header"),  # var id above declared n
    ("p cnf 3 1\ne 1 2 3 0\n1 2 0\n", "clause-size"),
    ("p cnf 3 1\ne 1 2 0\n1 2 3 0\n", "free-variable"),
    ("p cnf 3 1\ne 1 2 3 0\ne 2 0\n1 2 3 0\n", "duplicate-quantifier"),
    ("p cnf 3 1\ne 1 2 3 0\n1 -1 3 0\n", "duplicate-in-clause"),
], ids=lambda x: x if isinstance(x, str) and "\n" not in x else None)
def test_parse_errors_carry_rule(text, rule):
    with pytest.raises(QbfFormatError) as e:
        parse_qdimacs(text)
    assert e.value.rule == rule


def test_quantifier_line_after_clause_rejected():
    with pytest.raises(QbfFormatError) as e:
        parse_qdimacs("p cnf 4 1\ne 1 2 3 0\n1 2 3 0\na 4 0\n")
    assert e.value.rule == "syntax"


def test_qbf_value_validation():
    with pytest.raises(QbfFormatError):
        Qbf((("some", 1),), ())
    with pytest.raises(QbfFormatError):
        Qbf(((EXISTS, 1), (EXISTS, 2), (EXISTS, 3)), ((1, 2, 0),))


def brute_truth(q: Qbf) -> bool:
    """Independent evaluation: expand the whole game tree over assignments."""

    def go(i, assign):
        if i == len(q.prefix):
            return all(
                any(assign[abs(l)] == (l > 0) for l in cl) for cl in q.clauses)
        quant, var = q.prefix[i]
        vals = []
        for b in (False, True):
            assign[var] = b
            vals.append(go(i + 1, assign))
        return any(vals) if quant == EXISTS else all(vals)

    return go(0, {})


def test_evaluate_matches_brute_force():
    rng = random.Random(99)
    pool = [tuple(v * s for v, s in zip((1, 2, 3), signs))
            for signs in itertools.product((1, -1), repeat=3)]
    for _ in range(40):
        prefix = tuple(
            (rng.choice((EXISTS, FORALL)), v) for v in rng.sample((1, 2, 3), 3))
        clauses = tuple(rng.sample(pool, rng.randrange(1, 5)))
        q = Qbf(prefix, clauses)
        assert evaluate(q) == brute_truth(q)
        assert evaluate_sub(q, {}) == evaluate(q)


def test_evaluate_sub_prefix_splits():
    q = parse_qdimacs(GOOD)
    # fixing x3 keeps the inner exists-forall suffix
    for b in (False, True):
        got = evaluate_sub(q, {3: b})
        want = any(
            all(brute_matrix(q, {3: b, 2: c, 1: d}) for d in (False, True))
            for c in (False, True))
        assert got == want
    with pytest.raises(QbfFormatError):
        evaluate_sub(q, {2: True})  # not the outermost variable
    with pytest.raises(QbfFormatError):
        evaluate_sub(q, {3: True, 2: True, 1: True, 4: True})


def brute_matrix(q: Qbf, assign) -> bool:
    return all(any(assign[abs(l)] == (l > 0) for l in cl) for cl in q.clauses)


def test_gamma_ledger_arithmetic():
    q = parse_qdimacs(GOOD)
    led = gamma(q)
    assert led.m == 2
    assert led.quantifiers == (FORALL, EXISTS, FORALL)  # innermost-first
    assert led.inner_to_variable == (1, 2, 3)
    assert led.gammas == (11, 16, 19, 24)  # 2m+7 then +5, +3, +5
    assert led.value == 24
    assert led.literal_prices == (13, 17, 21)  # -3 forall, -2 exists
    assert led.clause_tolls == (2, 4)
    assert led.inner_index(3) == 3
    with pytest.raises(KeyError):
        led.inner_index(9)


def test_gamma_needs_a_clause():
    q = Qbf(((EXISTS, 1),), ())
    with pytest.raises(QbfFormatError):
        gamma(q)


def test_gamma_json_roundtrip():
    led = gamma(parse_qdimacs("p cnf 3 1\ne 1 2 3 0\n1 2 3 0\n"))
    blob = json.loads(led.to_json())
    assert blob["gammas"] == [9, 12, 15, 18]
    assert blob["value"] == 18
    assert blob["literal_prices"] == [10, 13, 16]
    assert blob["clause_tolls"] == [2]
    assert blob["quantifiers_innermost_first"] == ["exists"] * 3


def test_gamma_ledger_is_value_object():
    a = gamma(parse_qdimacs(GOOD))
    b = gamma(parse_qdimacs(GOOD))
    assert a == b
    assert isinstance(a, GammaLedger)
