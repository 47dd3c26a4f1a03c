"""Quantified 3-CNF formulas: QDIMACS parsing, evaluation, and price ledgers.

A :class:`Qbf` is a closed prenex formula ``Q1 x1 . Q2 x2 ... Qn xn . F``
where ``F`` is a conjunction of clauses with exactly three literals over
three distinct variables.  The prefix is stored outermost-first, matching
the order quantifier lines appear in a QDIMACS file.

:func:`gamma` computes the price ledger that the hardness reduction in
:mod:`pebbling.reduction` targets: a base price driven by the clause count
plus a fixed increment per quantifier, accumulated from the innermost
quantifier outward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

__all__ = [
    "FORALL",
    "EXISTS",
    "Qbf",
    "QbfFormatError",
    "GammaLedger",
    "parse_qdimacs",
    "evaluate",
    "evaluate_sub",
    "gamma",
]

FORALL = "forall"
EXISTS = "exists"

# Ledger increments: base price for a bare m-clause matrix, plus the growth
# contributed by each quantifier gadget wrapped around it.
MATRIX_BASE_OFFSET = 7
EXISTS_STEP = 3
FORALL_STEP = 5


class QbfFormatError(ValueError):
    """Raised when QDIMACS text or a Qbf value violates the 3-CNF closed-form rules.

    ``rule`` names the violated constraint:

    - ``syntax``: malformed tokens or truncated input
    - ``header``: bad or inconsistent ``p cnf`` line
    - ``clause-size``: a clause without exactly three literals
    - ``free-variable``: a clause literal over an unquantified variable
    - ``duplicate-quantifier``: a variable bound more than once
    - ``duplicate-in-clause``: one variable appearing twice in a clause
    """

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


@dataclass(frozen=True)
class Qbf:
    """Closed prenex 3-CNF formula.

    prefix: (quantifier, variable) pairs, outermost first.
    clauses: 3-tuples of nonzero signed variable ids.
    """

    prefix: tuple[tuple[str, int], ...]
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for quant, var in self.prefix:
            if quant not in (FORALL, EXISTS):
                raise QbfFormatError("syntax", f"unknown quantifier {quant!r}")
            if var <= 0:
                raise QbfFormatError("syntax", f"variable ids must be positive, got {var}")
            if var in seen:
                raise QbfFormatError(
                    "duplicate-quantifier", f"variable {var} quantified more than once"
                )
            seen.add(var)
        for idx, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise QbfFormatError(
                    "clause-size", f"clause {idx} has {len(clause)} literals, want 3"
                )
            vars_here = [abs(lit) for lit in clause]
            if any(lit == 0 for lit in clause):
                raise QbfFormatError("syntax", f"clause {idx} contains a zero literal")
            if len(set(vars_here)) != 3:
                raise QbfFormatError(
                    "duplicate-in-clause",
                    f"clause {idx} repeats a variable: {clause}",
                )
            for v in vars_here:
                if v not in seen:
                    raise QbfFormatError(
                        "free-variable", f"clause {idx} uses unquantified variable {v}"
                    )

    @property
    def n(self) -> int:
        """Number of quantified variables."""
        return len(self.prefix)

    @property
    def m(self) -> int:
        """Number of clauses."""
        return len(self.clauses)

    @cached_property
    def variables(self) -> tuple[int, ...]:
        """Variable ids, outermost-first."""
        return tuple(var for _, var in self.prefix)


def parse_qdimacs(text: str) -> Qbf:
    """Parse QDIMACS text into a validated :class:`Qbf`.

    Accepts comment lines (``c ...``), one ``p cnf <nvars> <nclauses>``
    header, quantifier lines (``a``/``e`` followed by variable ids and a
    terminating 0) before any clause, then clauses as 0-terminated literal
    runs which may span lines.
    """
    header: tuple[int, int] | None = None
    prefix: list[tuple[str, int]] = []
    clause_tokens: list[int] = []
    in_clauses = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if header is not None:
                raise QbfFormatError("header", f"line {lineno}: second header line")
            if in_clauses or prefix:
                raise QbfFormatError("header", f"line {lineno}: header after body")
            if len(fields) != 4 or fields[1] != "cnf":
                raise QbfFormatError("header", f"line {lineno}: want 'p cnf <n> <m>'")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise QbfFormatError("header", f"line {lineno}: non-numeric header counts")
            if header[0] < 0 or header[1] < 0:
                raise QbfFormatError("header", f"line {lineno}: negative header counts")
            continue
        if header is None:
            raise QbfFormatError("header", f"line {lineno}: body before 'p cnf' header")
        if fields[0] in ("a", "e"):
            if in_clauses:
                raise QbfFormatError(
                    "syntax", f"line {lineno}: quantifier line after first clause"
                )
            quant = FORALL if fields[0] == "a" else EXISTS
            try:
                ids = [int(tok) for tok in fields[1:]]
            except ValueError:
                raise QbfFormatError("syntax", f"line {lineno}: non-numeric variable id")
            if not ids or ids[-1] != 0:
                raise QbfFormatError(
                    "syntax", f"line {lineno}: quantifier line must end with 0"
                )
            if any(v == 0 for v in ids[:-1]) or not ids[:-1]:
                raise QbfFormatError(
                    "syntax", f"line {lineno}: quantifier line needs variable ids before 0"
                )
            for v in ids[:-1]:
                if v < 0:
                    raise QbfFormatError(
                        "syntax", f"line {lineno}: negative id in quantifier line"
                    )
                prefix.append((quant, v))
            continue
        # Clause tokens; clauses are 0-terminated and may span lines.
        in_clauses = True
        try:
            clause_tokens.extend(int(tok) for tok in fields)
        except ValueError:
            raise QbfFormatError("syntax", f"line {lineno}: non-numeric clause literal")

    if header is None:
        raise QbfFormatError("header", "missing 'p cnf' header")

    clauses: list[tuple[int, int, int]] = []
    current: list[int] = []
    for tok in clause_tokens:
        if tok == 0:
            if len(current) != 3:
                raise QbfFormatError(
                    "clause-size",
                    f"clause {len(clauses) + 1} has {len(current)} literals, want 3",
                )
            clauses.append((current[0], current[1], current[2]))
            current = []
        else:
            current.append(tok)
    if current:
        raise QbfFormatError("syntax", "trailing clause literals without terminating 0")

    n_declared, m_declared = header
    declared_vars = {var for _, var in prefix}
    if any(v > n_declared for v in declared_vars):
        raise QbfFormatError("header", "quantified variable id exceeds declared count")
    if len(clauses) != m_declared:
        raise QbfFormatError(
            "header", f"declared {m_declared} clauses, found {len(clauses)}"
        )

    return Qbf(prefix=tuple(prefix), clauses=tuple(clauses))


def _matrix_value(q: Qbf, assign: dict[int, bool]) -> bool:
    for clause in q.clauses:
        if not any(assign[abs(lit)] == (lit > 0) for lit in clause):
            return False
    return True


def _eval_from(q: Qbf, k: int, assign: dict[int, bool]) -> bool:
    """Truth of the suffix starting at prefix position k under assign."""
    if k == len(q.prefix):
        return _matrix_value(q, assign)
    quant, var = q.prefix[k]
    outcomes = []
    for value in (False, True):
        assign[var] = value
        outcomes.append(_eval_from(q, k + 1, assign))
        del assign[var]
    return any(outcomes) if quant == EXISTS else all(outcomes)


def evaluate(q: Qbf) -> bool:
    """Game-tree truth value of the closed formula (exponential; small n only)."""
    return _eval_from(q, 0, {})


def evaluate_sub(q: Qbf, assignment: dict[int, bool]) -> bool:
    """Truth of the suffix left after fixing the outermost variables.

    ``assignment`` must cover exactly the first len(assignment) prefix
    variables, i.e. an assignment to x1..xk for some split point k.
    """
    k = len(assignment)
    if k > len(q.prefix):
        raise QbfFormatError("syntax", "assignment larger than prefix")
    expected = {var for _, var in q.prefix[:k]}
    if set(assignment) != expected:
        raise QbfFormatError(
            "syntax",
            f"assignment domain mismatch: want outermost variables {sorted(expected)}, "
            f"got {sorted(assignment)}",
        )
    return _eval_from(q, k, dict(assignment))


@dataclass(frozen=True)
class GammaLedger:
    """Price ledger for the QBF-to-pebbling reduction.

    Quantifier bookkeeping runs innermost-first (index 1 = innermost
    quantifier), the reverse of the QDIMACS prefix order.  The ledger
    stores the mapping explicitly so gadget wiring can translate between
    the two orders without off-by-one errors.

    gammas[0] is the price of the bare clause matrix gadget; gammas[i]
    adds the i-th innermost quantifier's increment.  literal_prices[i-1]
    is the tree height parameter used by the variable gadget of the i-th
    innermost variable.  clause_tolls[j-1] is the turnpike toll protecting
    clause j (1-based, in input order).
    """

    m: int
    quantifiers: tuple[str, ...]  # innermost-first
    inner_to_variable: tuple[int, ...]  # inner index i -> variable id, innermost-first
    gammas: tuple[int, ...]  # gammas[i] for i = 0..n
    literal_prices: tuple[int, ...]  # innermost-first, one per variable
    clause_tolls: tuple[int, ...]  # clause j (input order) -> toll

    @property
    def value(self) -> int:
        """γ of the whole formula."""
        return self.gammas[-1]

    def inner_index(self, var: int) -> int:
        """1-based innermost-first position of a variable id."""
        try:
            return self.inner_to_variable.index(var) + 1
        except ValueError:
            raise KeyError(f"variable {var} not in ledger")

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "quantifiers_innermost_first": list(self.quantifiers),
                "inner_to_variable": list(self.inner_to_variable),
                "gammas": list(self.gammas),
                "literal_prices": list(self.literal_prices),
                "clause_tolls": list(self.clause_tolls),
                "value": self.value,
            },
            indent=2,
        )


def gamma(q: Qbf) -> GammaLedger:
    """Compute the reduction's price ledger for a formula.

    The base price covers the clause matrix: 2m + 7 for m clauses.  Each
    existential quantifier adds 3 and each universal adds 5, accumulated
    innermost-first.  Formulas with no clauses are rejected: the matrix
    gadget is a conjunction chain seeded with at least one clause.
    """
    if q.m == 0:
        raise QbfFormatError("clause-size", "gamma needs at least one clause")
    inner_prefix = tuple(reversed(q.prefix))
    quantifiers = tuple(quant for quant, _ in inner_prefix)
    inner_to_variable = tuple(var for _, var in inner_prefix)

    gammas = [2 * q.m + MATRIX_BASE_OFFSET]
    for quant in quantifiers:
        step = EXISTS_STEP if quant == EXISTS else FORALL_STEP
        gammas.append(gammas[-1] + step)

    # Variable gadget heights: the i-th innermost variable's literal trees
    # must price 2 below an existential wrapper and 3 below a universal one.
    literal_prices = []
    for i, quant in enumerate(quantifiers, start=1):
        drop = 2 if quant == EXISTS else 3
        literal_prices.append(gammas[i] - drop)

    clause_tolls = tuple(2 * j for j in range(1, q.m + 1))

    return GammaLedger(
        m=q.m,
        quantifiers=quantifiers,
        inner_to_variable=inner_to_variable,
        gammas=tuple(gammas),
        literal_prices=tuple(literal_prices),
        clause_tolls=clause_tolls,
    )
