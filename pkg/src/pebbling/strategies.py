"""Explicit pebbling strategies and game callbacks, certified by replay.

Every emitter in this module returns a concrete move sequence whose peak
pebble count matches the family's known price; nothing here is trusted,
the engine validator is the arbiter.  The emitters are deterministic:
wherever a choice is arbitrary (which half to recurse on first, which
vertex of a configuration to pebble next) ascending vertex id or the
lower half wins, so golden traces are reproducible.

The module also builds strategy callbacks for the pebble game played
between a Pebbler (who places pebbles) and a Challenger (who chases
them): a Pebbler that finishes fast by bisecting a standard trace, a
Challenger for road graphs that survives long by tracking blocking
sets, and optimal players driven by exact game values for cross checks.
"""

from __future__ import annotations

import sys
from typing import Any, Callable

from pebbling.dag import Dag, ancestor_masks, ancestors, bits
from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    Trace,
    configs_of,
    flip_moves,
    place,
    remove,
    replay,
)
from pebbling.families import (
    GadgetHandle,
    christmas_tree,
    extra_pebbles,
    max_height,
    pyramid,
    road,
)
from pebbling.products import reversible_cell_ids, standard_block_layout
from pebbling.qbf import EXISTS, Qbf, evaluate_sub
from pebbling.reduction import ReductionResult, qbf_reduction
from pebbling.solver import (
    ChallengerFn,
    GameState,
    IllegalStrategyError,
    PebblerFn,
)

__all__ = [
    "StrategyBudgetError",
    "strat_path_reversible",
    "strat_pyramid_standard",
    "strat_pyramid_reversible",
    "strat_tree_reversible",
    "strat_christmas",
    "strat_mold",
    "strat_product_reversible",
    "strat_product_standard",
    "strat_qbf",
    "dt_pebbler_bisection",
    "dt_challenger_road",
    "dt_pebbler_optimal",
    "dt_challenger_optimal",
]


class StrategyBudgetError(RuntimeError):
    """Raised when an emitted trace would exceed a caller-imposed move cap."""


# ---------------------------------------------------------------------------
# path segments
#
# The workhorse contract: a segment is a list of consecutive path vertices
# v_p..v_q whose entry vertex either is a source or has its lone predecessor
# pebbled (and kept pebbled) by the caller.  A persist run takes the segment
# from empty to {v_q} exactly; a reach run ends in any configuration that
# contains v_q, junk allowed.  Budgets count pebbles on the segment only.


def _persist_segment(vs: list[int], budget: int, out: list[int]) -> None:
    """Empty -> {vs[-1]} using at most `budget` pebbles on the segment.

    Checkpoint recursion: persist a vertex near the midpoint with one
    pebble less, persist the rest anchored on the checkpoint, then run
    the first phase backwards to clean the checkpoint.  Handles length
    up to 2^(budget-1) - 1.
    """
    length = len(vs) - 1
    if length > (1 << (budget - 1)) - 1:
        raise ValueError(f"segment of length {length} needs more than {budget} pebbles")
    if length == 0:
        out.append(place(vs[0]))
        return
    cut = length // 2
    mark = len(out)
    _persist_segment(vs[: cut + 1], budget - 1, out)
    first = out[mark:]
    _persist_segment(vs[cut + 1 :], budget - 1, out)
    out.extend(flip_moves(first))


def _reach_segment(vs: list[int], budget: int, out: list[int]) -> None:
    """Empty -> some configuration containing vs[-1]; handles length up
    to 2^budget - 2 by keeping a checkpoint pebble per budget level."""
    length = len(vs) - 1
    if length > (1 << budget) - 2:
        raise ValueError(f"cannot reach across length {length} with {budget} pebbles")
    reach_of_persist = (1 << (budget - 1)) - 1
    if length <= reach_of_persist:
        _persist_segment(vs, budget, out)
        return
    cut = reach_of_persist
    _persist_segment(vs[: cut + 1], budget, out)
    _reach_segment(vs[cut + 1 :], budget - 1, out)


def strat_path_reversible(length: int) -> Trace:
    """Reversible persistent pebbling of path(length) at the exact price.

    Space floor(log2 length) + 2 for length >= 1; the one-vertex path
    degenerates to a single placement.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    if length == 0:
        return Trace(REVERSIBLE, [place(0)])
    budget = length.bit_length() + 1
    out: list[int] = []
    _persist_segment(list(range(length + 1)), budget, out)
    return Trace(REVERSIBLE, out)


# ---------------------------------------------------------------------------
# pyramids, standard flavor


def strat_pyramid_standard(h: int) -> Trace:
    """Bottom-up frontier sweep: fill the base row, then build each row on
    top of the last while retiring pebbles whose successors are done.
    Peak h + 2 for h >= 1; a bare apex for h = 0."""
    if h < 0:
        raise ValueError("height must be >= 0")
    rows = pyramid(h).meta["rows"]
    if h == 0:
        return Trace(STANDARD, [place(rows[0][0])])
    out = [place(v) for v in rows[0]]
    for r in range(h):
        width_above = h - r
        for k in range(width_above):
            out.append(place(rows[r + 1][k]))
            out.append(remove(rows[r][k]))
        out.append(remove(rows[r][width_above]))
    return Trace(STANDARD, out)


# ---------------------------------------------------------------------------
# complete binary trees, reversible flavor
#
# Trees use heap ids: the sink is 0 and vertex x has predecessors 2x+1
# (left) and 2x+2 (right).  The construction walks the all-right spine
# v_i (v at depth i from the bottom), persists the left subtrees hanging
# off it plus one full subtree low on the spine, and finishes the spine
# as an anchored chain whose budget telescopes into the extra-pebble
# arithmetic of the family.


def _tree_surround(x: int, height: int, out: list[int]) -> None:
    """Empty -> a configuration covering both predecessors of x."""
    if height == 0:
        return
    delta = extra_pebbles(height)
    keep_below = max_height(delta - 1) + 1  # lowest spine level persisted lazily
    spine = [x]  # spine[t] = the vertex at height - t along right children
    for _ in range(height - keep_below + 1):
        spine.append(2 * spine[-1] + 2)
    for level in range(height, keep_below - 1, -1):
        _tree_persist(2 * spine[height - level] + 1, level - 1, out)
    _tree_persist(spine[height - keep_below + 1], keep_below - 1, out)
    chain = [spine[height - level] for level in range(keep_below, height)]
    if chain:
        budget = len(chain).bit_length()
        _reach_segment(chain, budget, out)


def _tree_persist(x: int, height: int, out: list[int]) -> None:
    """Empty -> {x} on the height-`height` subtree rooted at x."""
    mark = len(out)
    _tree_surround(x, height, out)
    surround = out[mark:]
    out.append(place(x))
    out.extend(flip_moves(surround))


def strat_tree_reversible(h: int) -> Trace:
    """Reversible persistent pebbling of binary_tree(h) at the exact
    price h + extra_pebbles(h)."""
    if h < 0:
        raise ValueError("height must be >= 0")
    out: list[int] = []
    _tree_persist(0, h, out)
    return Trace(REVERSIBLE, out)


# ---------------------------------------------------------------------------
# pyramids, reversible flavor, by projecting the tree strategy
#
# Collapsing a complete binary tree by identifying equal-depth vertices
# whose root paths have the same number of right turns gives exactly the
# pyramid, and predecessors project to predecessors.  Replaying the tree
# trace through the projection with a multiplicity counter per pyramid
# vertex (emit a placement on 0 -> 1, a removal on 1 -> 0) yields a legal
# pyramid trace of no greater space.

_PYRAMID_MOVES: dict[int, list[int]] = {}


def _pyramid_reversible_moves(h: int) -> list[int]:
    got = _PYRAMID_MOVES.get(h)
    if got is not None:
        return got
    rows = pyramid(h).meta["rows"]
    tree_moves: list[int] = []
    _tree_persist(0, h, tree_moves)
    counts = [0] * sum(len(row) for row in rows)
    out: list[int] = []
    for mv in tree_moves:
        heap_code = (mv >> 1) + 1
        depth = heap_code.bit_length() - 1
        right_turns = heap_code.bit_count() - 1
        v = rows[h - depth][right_turns]
        if mv & 1:
            counts[v] += 1
            if counts[v] == 1:
                out.append(place(v))
        else:
            counts[v] -= 1
            if counts[v] == 0:
                out.append(remove(v))
    _PYRAMID_MOVES[h] = out
    return out


def strat_pyramid_reversible(h: int) -> Trace:
    """Reversible persistent pebbling of pyramid(h) at the exact price
    h + extra_pebbles(h), obtained by projecting the tree strategy."""
    if h < 0:
        raise ValueError("height must be >= 0")
    return Trace(REVERSIBLE, list(_pyramid_reversible_moves(h)))


# ---------------------------------------------------------------------------
# stacked fixed-price layers


def _fixed_price_moves(handle: GadgetHandle) -> list[int]:
    """Persist the sink of a fixed_price_graph handle, in its own ids."""
    kind = handle.meta["kind"]
    if kind == "pyramid":
        return _pyramid_reversible_moves(handle.meta["h"])
    if kind != "teabag" or handle.meta["tail"] != 1:
        raise ValueError(f"unsupported fixed-price layout {kind!r}")
    pyr = _pyramid_reversible_moves(handle.meta["h"])
    tail = handle.meta["tail_ids"][-1]
    return pyr + [place(tail)] + flip_moves(pyr)


_XMAS_MOVES: dict[int, list[int]] = {}


def _christmas_moves(r: int, guard: Callable[[int], None] | None = None) -> list[int]:
    """Persistent pebbling of christmas_tree(r) at space exactly r.

    Layer sinks are persisted bottom up and kept, which feeds each next
    layer's sources; one placement tops out and a full reversal cleans
    the scaffolding.  `guard` sees an upper bound on the move count
    before anything is materialized.
    """
    got = _XMAS_MOVES.get(r)
    if got is not None:
        return got
    if guard is not None:
        guard(_christmas_len_bound(r))
    handle = christmas_tree(r)
    layers = handle.meta["layers"]
    scaffold: list[int] = []
    for layer in layers[:-1]:
        ids = layer["ids"]
        for mv in _fixed_price_moves(layer["inner"]):
            scaffold.append((ids[mv >> 1] << 1) | (mv & 1))
    out = scaffold + [place(layers[-1]["sink"])] + flip_moves(scaffold)
    _XMAS_MOVES[r] = out
    return out


def strat_christmas(r: int) -> Trace:
    """Persistent pebbling of christmas_tree(r) at space exactly r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return Trace(REVERSIBLE, list(_christmas_moves(r)))


# --- move-count estimates, used to refuse absurd emissions early ----------

_SEG_LEN: dict[int, int] = {}


def _persist_seg_len(length: int) -> int:
    if length == 0:
        return 1
    got = _SEG_LEN.get(length)
    if got is None:
        cut = length // 2
        got = 2 * _persist_seg_len(cut) + _persist_seg_len(length - cut - 1)
        _SEG_LEN[length] = got
    return got


def _reach_seg_len(length: int, budget: int) -> int:
    cut = (1 << (budget - 1)) - 1
    if length <= cut:
        return _persist_seg_len(length)
    return _persist_seg_len(cut) + _reach_seg_len(length - cut - 1, budget - 1)


_TREE_LEN: dict[int, int] = {}


def _tree_persist_len(height: int) -> int:
    got = _TREE_LEN.get(height)
    if got is not None:
        return got
    if height == 0:
        total = 1
    else:
        delta = extra_pebbles(height)
        keep_below = max_height(delta - 1) + 1
        surround = sum(
            _tree_persist_len(level - 1)
            for level in range(height, keep_below - 1, -1)
        )
        surround += _tree_persist_len(keep_below - 1)
        chain = height - keep_below
        if chain:
            surround += _reach_seg_len(chain - 1, chain.bit_length())
        total = 2 * surround + 1
    _TREE_LEN[height] = total
    return total


def _fixed_price_len_bound(price: int) -> int:
    # tree length bounds the projected pyramid length
    h = 0
    while True:
        v = h + extra_pebbles(h)
        if v == price:
            return _tree_persist_len(h)
        if v > price:
            return 2 * _tree_persist_len(h - 1) + 1
        h += 1


def _christmas_len_bound(r: int) -> int:
    return 1 + 2 * sum(_fixed_price_len_bound(r - t) for t in range(1, r))


# ---------------------------------------------------------------------------
# vertex-split simulation (molds and turnpikes)


def _as_dag(g: Dag | GadgetHandle) -> Dag:
    return g.graph if isinstance(g, GadgetHandle) else g


def _split_sim_moves(moves: list[int], ids: list[int] | None = None) -> list[int]:
    """Simulate a reversible trace on the split (in/out) copy of its graph.

    Each inner placement becomes enter-commit-leave on the vertex pair;
    each inner removal mirrors it.  With `ids` the split vertices are
    translated through an embedding table.
    """
    out: list[int] = []
    for mv in moves:
        v = mv >> 1
        v_in, v_out = 2 * v, 2 * v + 1
        if ids is not None:
            v_in, v_out = ids[v_in], ids[v_out]
        if mv & 1:
            out += [place(v_in), place(v_out), remove(v_in)]
        else:
            out += [place(v_in), remove(v_out), remove(v_in)]
    return out


def strat_mold(g: Dag | GadgetHandle, inner: Trace) -> Trace:
    """Persistent pebbling of mold(g) at space space(inner) + 2.

    The universal source is pebbled first and unpebbled last; in between
    the inner trace is simulated move for move on the split vertices.
    The inner trace must be a reversible persistent pebbling of g: the
    simulation re-enters a split vertex to remove its output, which
    needs the predecessors pebbled.
    """
    d = _as_dag(g)
    stats = replay(d, inner.moves, REVERSIBLE)
    if stats.final != 1 << d.require_sink():
        raise ValueError("inner trace does not end on exactly the sink")
    s = 2 * d.node_count
    out = [place(s)] + _split_sim_moves(inner.moves) + [remove(s)]
    return Trace(REVERSIBLE, out)


# ---------------------------------------------------------------------------
# products


def strat_product_reversible(
    g1: Dag | GadgetHandle, t1: Trace, g2: Dag | GadgetHandle, t2: Trace
) -> Trace:
    """Persistent pebbling of product_reversible(g1, g2) at space at most
    space(t1) + space(t2) + 1.

    Each move of t1 becomes a stage that persists or unpersists one
    block by running t2 through it cell by cell; between stages the only
    pebbles are the output nodes of the currently-pebbled g1 vertices'
    sink cells, which is what the next stage's exterior checks need.
    """
    d1, d2 = _as_dag(g1), _as_dag(g2)
    for d, t, which in ((d1, t1, "outer"), (d2, t2, "inner")):
        stats = replay(d, t.moves, REVERSIBLE)
        if stats.final != 1 << d.require_sink():
            raise ValueError(f"{which} trace does not end on exactly the sink")
    n2 = d2.node_count

    def stage(v1: int) -> list[int]:
        ops: list[int] = []
        for mv in t2.moves:
            ext, itr, out_ = reversible_cell_ids(n2, v1, mv >> 1)
            if mv & 1:
                ops += [place(ext), place(itr), place(out_), remove(itr), remove(ext)]
            else:
                ops += [place(ext), place(itr), remove(out_), remove(itr), remove(ext)]
        return ops

    out: list[int] = []
    for mv in t1.moves:
        forward = stage(mv >> 1)
        out.extend(forward if mv & 1 else flip_moves(forward))
    return Trace(REVERSIBLE, out)


def strat_product_standard(
    g1: Dag | GadgetHandle, t1: Trace, g2: Dag | GadgetHandle, t2: Trace
) -> Trace:
    """Standard pebbling of product_standard(g1, g2) at space at most
    space(t1) + space(t2) - 1.

    t1 is simulated with one pebble per g1 vertex, parked on its block's
    tip; placing runs t2 inside the block and walks the guarded tail,
    removing costs one move.
    """
    d1, d2 = _as_dag(g1), _as_dag(g2)
    for d, t, which in ((d1, t1, "outer"), (d2, t2, "inner")):
        if t.flavor != STANDARD:
            raise ValueError(f"{which} trace must use standard rules")
        stats = replay(d, t.moves, STANDARD)
        if stats.final != 1 << d.require_sink():
            raise ValueError(f"{which} trace does not end on exactly the sink")
    n1, n2 = d1.node_count, d2.node_count
    z2 = d2.require_sink()

    out: list[int] = []
    for mv in t1.moves:
        lay = standard_block_layout(n1, n2, mv >> 1)
        if not mv & 1:
            out.append(remove(lay["tip"]))
            continue
        base = lay["base"]
        for inner_mv in t2.moves:
            v2 = inner_mv >> 1
            out.append((base + v2) << 1 | (inner_mv & 1))
        prev = base + z2
        for extra, spine in zip(lay["extras"], lay["spine"]):
            out += [place(extra), place(spine), remove(extra), remove(prev)]
            prev = spine
    return Trace(STANDARD, out)


# ---------------------------------------------------------------------------
# the full formula strategy
#
# Persisting the sink of qbf_reduction(phi) at space gamma(phi), plus one
# when phi is false.  The emitter mirrors the reduction's layering: put a
# variable in its canonical position, recurse on the quantifier suffix,
# cross the wrapper's turnpikes, cap the stage sink, and run everything
# backwards.  Universal stages do this for both branch values with a
# full reversal in between; existential stages commit to a witness that
# makes the rest true when one exists.


class _QbfEmitter:
    def __init__(self, result: ReductionResult, move_budget: int | None):
        self.meta = result.handle.meta
        self.phi: Qbf = self.meta["formula"]
        self.budget = move_budget
        self.spent = 0
        self._lit_tree: dict[int, list[int]] = {}
        self._canon: dict[tuple[int, bool], list[int]] = {}
        self._cross: dict[int, list[int]] = {}
        self._chain: dict[tuple[int, tuple], list[int]] = {}
        self._seed: list[int] | None = None

    # accounting ---------------------------------------------------------

    def _guard(self, upcoming: int) -> None:
        if self.budget is not None and self.spent + upcoming > self.budget:
            raise StrategyBudgetError(
                f"formula strategy needs over {self.budget} moves "
                f"({self.spent} emitted, {upcoming} more requested)")

    def _charge(self, amount: int) -> None:
        self.spent += amount
        if self.budget is not None and self.spent > self.budget:
            raise StrategyBudgetError(
                f"formula strategy exceeded the {self.budget}-move cap")

    def _flip(self, moves: list[int]) -> list[int]:
        self._charge(len(moves))
        return flip_moves(moves)

    def _translate(self, moves: list[int], ids: list[int]) -> list[int]:
        self._charge(len(moves))
        return [(ids[mv >> 1] << 1) | (mv & 1) for mv in moves]

    # shared sub-traces --------------------------------------------------

    def lit_tree(self, side: dict[str, Any]) -> list[int]:
        """Persist the stack under one literal node; ends on its lock."""
        key = id(side)
        got = self._lit_tree.get(key)
        if got is None:
            base = _christmas_moves(side["tree"].meta["r"], guard=self._guard)
            got = self._translate(base, side["trans"])
            self._lit_tree[key] = got
        return got

    def canon(self, var: int, value: bool) -> list[int]:
        """Empty variable gadget -> its canonical position for `value`.

        The node side goes first (persist the stack, cap with the node,
        clean the stack), then the lock side's stack stays as the lock
        pebble itself.  Peak: literal price + 1.
        """
        key = (var, value)
        got = self._canon.get(key)
        if got is None:
            info = self.meta["variables"][var]
            node_side = info["pos"] if value else info["neg"]
            lock_side = info["neg"] if value else info["pos"]
            stack = self.lit_tree(node_side)
            got = stack + [place(node_side["node"])] + self._flip(stack)
            got += self.lit_tree(lock_side)
            self._charge(len(got))
            self._canon[key] = got
        return got

    def cross(self, pike: dict[str, Any]) -> list[int]:
        """Cross a turnpike whose entrance is already pebbled: leaves one
        pebble on the exit and nothing on the interior."""
        key = id(pike)
        got = self._cross.get(key)
        if got is None:
            if pike["toll"] == 0:
                got = [place(pike["exit"])]
            else:
                base = _christmas_moves(pike["toll"], guard=self._guard)
                self._charge(3 * len(base))
                got = _split_sim_moves(base, pike["trans"])
            self._cross[key] = got
        return got

    # matrix layers ------------------------------------------------------

    def clause_persist(self, clause: dict[str, Any], alpha: dict[int, bool]) -> list[int]:
        """Persist a clause gadget's sink: toll + 4 pebbles, one more if
        the assignment falsifies the clause.

        Unsatisfied literals need a transient pebble on their node (the
        lock is canonical, the node is not), so their pikes are crossed
        first while fewer exits sit around; satisfied literals cross for
        free off their canonical node pebble.
        """
        unsat: list[int] = []
        sat: list[int] = []
        for idx, lit in enumerate(clause["lits"]):
            value = alpha[lit["variable"]]
            (unsat if value == lit["negated"] else sat).append(idx)
        surround: list[int] = []
        for idx in unsat + sat:
            pike = clause["pikes"][idx]
            if idx in unsat:
                node = clause["lits"][idx]["node"]
                surround += [place(node)] + self.cross(pike) + [remove(node)]
            else:
                surround += self.cross(pike)
        nodes = clause["nodes"]
        surround += [place(nodes["u"]), place(nodes["v"])]
        self._charge(len(surround))
        return surround + [place(nodes["p"])] + self._flip(surround)

    def seed_persist(self) -> list[int]:
        if self._seed is None:
            seed = self.meta["seed"]
            base = _christmas_moves(seed["handle"].meta["r"], guard=self._guard)
            self._seed = self._translate(base, seed["trans"])
        return self._seed

    def chain_persist(self, k: int, alpha: dict[int, bool]) -> list[int]:
        """Persist the conjunction chain's k-th sink under assignment alpha."""
        if k == 0:
            return self.seed_persist()
        key = (k, tuple(sorted(alpha.items())))
        got = self._chain.get(key)
        if got is None:
            conj = self.meta["conjunctions"][k - 1]
            clause = self.meta["clauses"][k - 1]
            prev = self.chain_persist(k - 1, alpha)
            clp = self.clause_persist(clause, alpha)
            nodes = conj["nodes"]
            pikes = conj["pikes"]
            surround = (
                prev + self.cross(pikes[0]) + self._flip(prev)
                + clp + self.cross(pikes[1]) + self._flip(clp)
                + [place(nodes["d3"])] + self.cross(pikes[2])
            )
            self._charge(len(surround))
            got = surround + [place(nodes["e"])] + self._flip(surround)
            self._chain[key] = got
        return got

    # quantifier layers --------------------------------------------------

    def level_persist(self, i: int, alpha: dict[int, bool]) -> list[int]:
        if i == 0:
            return self.chain_persist(len(self.meta["clauses"]), alpha)
        stage = self.meta["quantifiers"][i - 1]
        if stage["kind"] == EXISTS:
            return self.exists_persist(stage, alpha)
        return self.forall_persist(stage, alpha)

    def _witness(self, var: int, alpha: dict[int, bool]) -> bool:
        for cand in (True, False):
            trial = dict(alpha)
            trial[var] = cand
            if evaluate_sub(self.phi, trial):
                return cand
        return True

    def exists_persist(self, stage: dict[str, Any], alpha: dict[int, bool]) -> list[int]:
        var = stage["variable"]
        info = self.meta["variables"][var]
        value = self._witness(var, alpha)
        sub = dict(alpha)
        sub[var] = value
        nodes = stage["nodes"]
        # the non-canonical node rides on its canonical lock for one round
        other_node = info["neg"]["node"] if value else info["pos"]["node"]
        surround = (
            self.canon(var, value)
            + self.level_persist(stage["i"] - 1, sub)
            + self.cross(stage["pikes"][0])
            + [place(other_node), place(nodes["g"])]
        )
        self._charge(len(surround))
        return surround + [place(nodes["q"])] + self._flip(surround)

    def forall_one_sided(
        self, stage: dict[str, Any], alpha: dict[int, bool], value: bool
    ) -> list[int]:
        """Play one branch of a universal stage: canonical position, the
        branch checkpoint, the quantified suffix, and the suffix pike."""
        var = stage["variable"]
        nodes = stage["nodes"]
        sub = dict(alpha)
        sub[var] = value
        check = nodes["f'"] if value else nodes["~f'"]
        check_pike = stage["pikes"][0] if value else stage["pikes"][1]
        suffix_pike = stage["pikes"][2] if value else stage["pikes"][3]
        moves = (
            self.canon(var, value)
            + [place(check)] + self.cross(check_pike) + [remove(check)]
            + self.level_persist(stage["i"] - 1, sub)
            + self.cross(suffix_pike)
        )
        self._charge(len(moves))
        return moves

    def forall_persist(self, stage: dict[str, Any], alpha: dict[int, bool]) -> list[int]:
        nodes = stage["nodes"]
        true_side = self.forall_one_sided(stage, alpha, True)
        false_side = self.forall_one_sided(stage, alpha, False)
        surround = (
            true_side + [place(nodes["h"])] + self._flip(true_side)
            + false_side + [place(nodes["~h"])]
        )
        self._charge(len(surround))
        return surround + [place(nodes["q"])] + self._flip(surround)

    def emit(self) -> list[int]:
        return self.level_persist(len(self.meta["quantifiers"]), {})


def strat_qbf(phi: Qbf, move_budget: int | None = None) -> Trace:
    """Persistent reversible pebbling of qbf_reduction(phi) at space
    gamma(phi), plus one exactly when phi is false.

    move_budget caps the emitted length; when the cap cannot be met a
    StrategyBudgetError is raised before memory fills up.  The meter is
    a conservative running estimate (shared sub-traces are charged when
    built and again when spliced), so it can trip within a small factor
    below the true length; a comfortable cap is never tripped early.
    Large literal prices make the certificate astronomically long, so a
    cap is advisable for anything beyond small formulas.
    """
    result = qbf_reduction(phi)
    emitter = _QbfEmitter(result, move_budget)
    return Trace(REVERSIBLE, emitter.emit())


# ---------------------------------------------------------------------------
# game strategies
#
# The game: round 1 pebbles the sink and challenges it.  Each later
# round the Pebbler places one pebble and the Challenger either stays
# or jumps to the fresh pebble; play ends when the challenged vertex
# has all predecessors pebbled.


def dt_pebbler_bisection(t: Trace) -> PebblerFn:
    """Pebbler that finishes within space(t) * ceil(log2 time(t)) rounds.

    The invariant is an interval [a, b] into t's configuration sequence:
    everything in config a is pebbled, and the challenged vertex was
    placed at step b.  The Pebbler works toward pebbling the midpoint
    configuration; a Challenger jump to one of those pebbles moves b
    down to that pebble's placement step, completing the batch moves a
    up, and either way the interval halves.

    The callback carries per-game state: build one per game.
    """
    if t.flavor != STANDARD:
        raise ValueError("bisection needs a standard-rules trace")
    state: dict[str, Any] = {"configs": None}

    def pebbler(d: Dag, gs: GameState) -> int:
        if state["configs"] is None:
            all_cfgs = configs_of(d, t)
            # bisect over configurations after each placement, so the
            # round bound is against the trace's placement count
            cfgs = [all_cfgs[0]] + [
                all_cfgs[i + 1] for i, mv in enumerate(t.moves) if mv & 1]
            z = d.require_sink()
            sink_step = next(
                (i for i, c in enumerate(cfgs) if c >> z & 1), None)
            if sink_step is None:
                raise ValueError("trace never pebbles the sink")
            state.update(configs=cfgs, a=0, b=sink_step, challenged=z)
        cfgs = state["configs"]
        if gs.challenged != state["challenged"]:
            # the Challenger jumped to a pebble from the current batch
            state["b"] = next(
                i for i in range(state["a"] + 1, len(cfgs))
                if cfgs[i] >> gs.challenged & 1)
            state["challenged"] = gs.challenged
        while True:
            a, b = state["a"], state["b"]
            if b - a <= 1:
                raise IllegalStrategyError(
                    "bisection interval is closed but the game went on")
            missing = cfgs[(a + b) // 2] & ~gs.pebbled
            if missing:
                return (missing & -missing).bit_length() - 1
            state["a"] = (a + b) // 2

    return pebbler


# --- road Challenger ------------------------------------------------------


def _focus_sources(d: Dag, focus: set[int]) -> list[int]:
    return [v for v in focus if not any(u in focus for u in d.preds[v])]


def _focus_path(
    d: Dag, focus: set[int], sink: int, avoid: set[int]
) -> list[int] | None:
    """A directed path from a focus source to the focus sink dodging
    `avoid`, or None if the avoid set blocks them all."""
    parent: dict[int, int | None] = {}
    stack = [v for v in _focus_sources(d, focus) if v not in avoid]
    for v in stack:
        parent[v] = None
    while stack:
        u = stack.pop()
        if u == sink:
            out = [u]
            while parent[out[-1]] is not None:
                out.append(parent[out[-1]])  # type: ignore[arg-type]
            out.reverse()
            return out
        for w in d.succs[u]:
            if w in focus and w not in avoid and w not in parent:
                parent[w] = u
                stack.append(w)
    return None


def _minimal_blocking(
    d: Dag, focus: set[int], sink: int, pebbles: set[int], keep: int
) -> set[int]:
    """Prune a blocking pebble set to an inclusion-minimal one; the
    freshly placed pebble `keep` survives pruning by construction."""
    block = set(pebbles)
    for p in sorted(pebbles):
        if p == keep:
            continue
        if _focus_path(d, focus, sink, block - {p}) is None:
            block.discard(p)
    return block


def dt_challenger_road(w: int, length: int) -> ChallengerFn:
    """Challenger for road(w, length) that survives about
    w * log2(length / w) / 2 rounds against any Pebbler.

    It focuses on a subroad and keeps a pebble-free path from the focus
    sink up to the challenged pebble.  A pebble on that path triggers a
    jump that shortens it.  A pebble that cuts the focus off its sources
    triggers a refocus: below the cut onto the ancestors of a still-open
    vertex (jumping to the new pebble) when the cut is off-center or not
    layer-filling, otherwise above the cut (staying put).

    The callback carries per-game state: build one per game.
    """
    handle = road(w, length)
    n = handle.graph.node_count
    layer_of = handle.meta["layer_of"]
    layers = handle.meta["layers"]
    state: dict[str, Any] = {"init": False}

    def challenger(d: Dag, gs: GameState, placed: int) -> int:
        if d.node_count != n:
            raise ValueError("challenger was built for a different road")
        if not state["init"]:
            state.update(
                init=True, focus=set(range(n)), lo=0,
                path=[d.require_sink()], dead=False)
        current = gs.challenged
        if state["dead"]:
            return current
        open_path: list[int] = state["path"]
        if placed in open_path[:-1]:
            state["path"] = open_path[: open_path.index(placed) + 1]
            return placed
        focus: set[int] = state["focus"]
        focus_sink = open_path[0]
        if placed not in focus or placed == focus_sink:
            return current
        pebbled = set(bits(gs.pebbled))
        in_focus = (pebbled & focus) - {focus_sink}
        if _focus_path(d, focus, focus_sink, in_focus) is not None:
            return current
        block = _minimal_blocking(d, focus, focus_sink, in_focus, placed)
        low = min(layer_of[v] for v in block)
        high = max(layer_of[v] for v in block)
        top_width = sum(1 for v in block if layer_of[v] == high)
        top_full = top_width >= sum(1 for v in layers[high] if v in focus)
        lo, hi = state["lo"], layer_of[focus_sink]
        off_center = (low + high) / 2 - lo > (hi - lo) / 2
        if (not top_full or off_center) and low - 1 >= lo:
            witness = _focus_path(
                d, focus, focus_sink, (in_focus | {focus_sink}) - {placed})
            if witness is not None and placed in witness:
                by_layer = {layer_of[v]: v for v in witness}
                anchor = by_layer[low - 1]
                state["focus"] = set(ancestors(d, anchor)) & focus
                state["path"] = witness[
                    witness.index(anchor): witness.index(placed) + 1]
                return placed
        if high + 1 <= hi:
            state["lo"] = high + 1
            state["focus"] = {v for v in focus if layer_of[v] >= high + 1}
        else:
            state["dead"] = True
        return current

    return challenger


# --- optimal players, from exact game values ------------------------------


def _dt_value_fn(d: Dag) -> Callable[[int, int], int]:
    """Memoized remaining-rounds value of (pebbled mask, challenged)."""
    pms = d.pred_masks
    n = d.node_count
    anc = ancestor_masks(d)
    memo: dict[tuple[int, int], int] = {}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 * n + 100))

    def value(pmask: int, c: int) -> int:
        pm = pms[c]
        if pmask & pm == pm:
            return 0
        key = (pmask, c)
        got = memo.get(key)
        if got is not None:
            return got
        pool = anc[c] & ~pmask
        order = list(bits(pool & pm)) + list(bits(pool & ~pm))
        best = n + 1
        for v in order:
            nm = pmask | (1 << v)
            r_jump = value(nm, v)
            if r_jump + 1 >= best:
                continue
            r = 1 + max(r_jump, value(nm, c))
            if r < best:
                best = r
                if best == 1:
                    break
        memo[key] = best
        return best

    return value


def dt_pebbler_optimal(d: Dag) -> PebblerFn:
    """Pebbler that plays out the exact game value of d."""
    value = _dt_value_fn(d)

    def pebbler(dd: Dag, gs: GameState) -> int:
        anc = ancestor_masks(dd)
        pool = anc[gs.challenged] & ~gs.pebbled
        best_v, best_r = -1, dd.node_count + 2
        for v in bits(pool):
            nm = gs.pebbled | (1 << v)
            r = 1 + max(value(nm, v), value(nm, gs.challenged))
            if r < best_r:
                best_v, best_r = v, r
        if best_v < 0:
            raise IllegalStrategyError("no legal placement improves anything")
        return best_v

    return pebbler


def dt_challenger_optimal(d: Dag) -> ChallengerFn:
    """Challenger that plays out the exact game value of d; stays on ties."""
    value = _dt_value_fn(d)

    def challenger(dd: Dag, gs: GameState, placed: int) -> int:
        if value(gs.pebbled, placed) > value(gs.pebbled, gs.challenged):
            return placed
        return gs.challenged

    return challenger
