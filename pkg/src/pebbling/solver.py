"""Exact pebbling prices by budget-bounded search, and the two-player game.

price() iterates a space budget s upward; for each s it explores every
configuration reachable without ever exceeding s (counted inside the region
mask if one is given) and reports the first s where the goal is reachable.
Budgets below the answer are fully exhausted, so results are exact.

Configurations are int bitmasks. For the standard flavor removals are free,
so a configuration is dominated by any reachable superset; the search only
removes a pebble when a placement needs the room, which shrinks the state
space a lot. That shortcut is unsound for exact-config goals (and for the
reversible flavor), where the full move relation is explored instead.

dt_price() computes the Pebbler/Challenger game value by memoized minimax;
dt_play() referees a single game between two strategy callbacks.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Callable

from pebbling.dag import Dag, ancestor_masks, bits
from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    Trace,
    place,
    remove,
    validate_trace,
)

try:
    from pebbling import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

# compiled kernels handle at most this many vertices (uint64 configs)
_COMPILED_MAX_N = 63
_COMPILED_STATE_CAP = 100_000_000
# above _BITSET_MIN_N vertices, reversible no-region searches switch from the
# hash-table visited set to a 2^n-bit flat bitset; 33 bits = 1 GiB is the cap
_BITSET_MIN_N = 26
_BITSET_MAX_N = 33

GOAL_KINDS = ("persistent", "visiting", "surrounding", "config")


class CapExceededError(RuntimeError):
    """Search hit its budget or state cap; carries the bound proven so far."""

    def __init__(self, message: str, lower_bound: int, nodes_expanded: int = 0):
        super().__init__(message)
        self.lower_bound = lower_bound
        self.nodes_expanded = nodes_expanded


@dataclass(frozen=True)
class PriceQuery:
    flavor: str
    goal: str
    target: int | None = None  # config-goal bitmask
    region: int | None = None  # cost mask; None counts every vertex
    start: int = 0  # starting configuration
    budget_cap: int | None = None  # None = node count

    def __post_init__(self) -> None:
        if self.flavor not in (STANDARD, REVERSIBLE):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.goal not in GOAL_KINDS:
            raise ValueError(f"unknown goal {self.goal!r}")
        if self.goal == "config" and self.target is None:
            raise ValueError("config goal needs a target configuration")


@dataclass(frozen=True)
class PriceResult:
    price: int
    flavor: str
    goal: str
    nodes_expanded: int
    elapsed_ms: float

    def record(self, graph: str, region: bool = False) -> dict:
        out = {
            "graph": graph,
            "flavor": self.flavor,
            "goal": self.goal,
            "price": self.price,
            "nodes_expanded": self.nodes_expanded,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if region:
            out["region"] = True
        return out


def _goal_masks(d: Dag, q: PriceQuery) -> tuple[int, bool]:
    """Reduce every goal to either an exact-mask or superset-mask test."""
    if q.goal == "config":
        return q.target or 0, True
    z = d.require_sink()
    if q.goal == "persistent":
        return 1 << z, q.flavor == REVERSIBLE
    if q.goal == "visiting":
        return 1 << z, False
    # surrounding
    return d.pred_masks[z], False


# ---------------------------------------------------------------------------
# budget-bounded exploration kernels
#
# Each returns (found, states_seen). `parents` maps config -> (prev, moves)
# when trace extraction is requested. Loops are deliberately flat: these are
# the hot paths of every oracle in the test suite.

def _explore_reversible(
    d: Dag, s: int, start: int, goal: int, exact: bool,
    region: int | None, parents: dict | None,
):
    pms = d.pred_masks
    n = d.node_count
    if region is None:
        region = (1 << n) - 1
    seen = {start}
    stack = [start]
    pop = stack.pop
    push = stack.append
    while stack:
        cfg = pop()
        rc = (cfg & region).bit_count()
        room = rc < s
        for v in range(n):
            pm = pms[v]
            if cfg & pm != pm:
                continue
            b = 1 << v
            if cfg & b:
                nc = cfg ^ b
            elif room or not b & region:
                nc = cfg | b
            else:
                continue
            if nc in seen:
                continue
            seen.add(nc)
            if parents is not None:
                parents[nc] = (cfg, (place(v) if nc > cfg else remove(v),))
            if (nc == goal) if exact else (nc & goal == goal):
                return True, len(seen)
            push(nc)
    return False, len(seen)


def _explore_standard_dominant(
    d: Dag, s: int, start: int, goal: int,
    region: int | None, parents: dict | None,
):
    # Superset-dominance search: only monotone (superset-mask) goals.
    pms = d.pred_masks
    n = d.node_count
    if region is None:
        region = (1 << n) - 1
    seen = {start}
    stack = [start]
    pop = stack.pop
    push = stack.append
    while stack:
        cfg = pop()
        rc = (cfg & region).bit_count()
        for v in range(n):
            b = 1 << v
            pm = pms[v]
            if cfg & b or cfg & pm != pm:
                continue
            if not b & region or rc < s:
                nc = cfg | b
                if nc in seen:
                    continue
                seen.add(nc)
                if parents is not None:
                    parents[nc] = (cfg, (place(v),))
                if nc & goal == goal:
                    return True, len(seen)
                push(nc)
            else:
                # at the region budget: drop one counted pebble to make room
                drop = cfg & region & ~pm
                while drop:
                    xb = drop & -drop
                    drop ^= xb
                    nc = (cfg ^ xb) | b
                    if nc in seen:
                        continue
                    seen.add(nc)
                    if parents is not None:
                        parents[nc] = (cfg, (remove(xb.bit_length() - 1), place(v)))
                    if nc & goal == goal:
                        return True, len(seen)
                    push(nc)
    return False, len(seen)


def _explore_standard_full(
    d: Dag, s: int, start: int, goal: int, exact: bool,
    region: int | None, parents: dict | None,
):
    pms = d.pred_masks
    n = d.node_count
    if region is None:
        region = (1 << n) - 1
    seen = {start}
    stack = [start]
    pop = stack.pop
    push = stack.append
    while stack:
        cfg = pop()
        rc = (cfg & region).bit_count()
        room = rc < s
        for v in range(n):
            b = 1 << v
            if cfg & b:
                nc = cfg ^ b
            else:
                pm = pms[v]
                if cfg & pm != pm:
                    continue
                if not (room or not b & region):
                    continue
                nc = cfg | b
            if nc in seen:
                continue
            seen.add(nc)
            if parents is not None:
                parents[nc] = (cfg, (place(v) if nc > cfg else remove(v),))
            if (nc == goal) if exact else (nc & goal == goal):
                return True, len(seen)
            push(nc)
    return False, len(seen)


def _compiled_step(d: Dag, q: PriceQuery, s: int, goal: int, exact: bool,
                   dominant: bool):
    """One budget worth of search in the compiled kernel, or None if the
    query shape is not supported there."""
    if _kernels is None or not _kernels.AVAILABLE:
        return None
    n = d.node_count
    if n > _COMPILED_MAX_N:
        return None
    import numpy as np

    pms = np.array(d.pred_masks, dtype=np.uint64)
    full = (1 << n) - 1
    no_region = q.region is None or q.region == full
    region = np.uint64(q.region if q.region is not None else full)
    if dominant:
        code, states = _kernels.search_standard_dominant(
            pms, s, np.uint64(q.start), np.uint64(goal), region,
            _COMPILED_STATE_CAP)
    elif n > _BITSET_MIN_N and n <= _BITSET_MAX_N and no_region:
        # hash-table visited sets outgrow memory here; a flat bitset does not
        code, states = _kernels.search_reversible_bitset(
            pms, s, np.uint64(q.start), np.uint64(goal), bool(exact))
    else:
        code, states = _kernels.search_reversible(
            pms, s, np.uint64(q.start), np.uint64(goal), bool(exact), region,
            _COMPILED_STATE_CAP)
    if code == _kernels.CAPPED:
        raise CapExceededError(
            f"search exceeded {_COMPILED_STATE_CAP} states at budget {s}",
            lower_bound=s, nodes_expanded=int(states))
    return code == _kernels.FOUND, int(states)


def _run_query(d: Dag, q: PriceQuery, parents_out: dict | None = None,
               compiled: bool | None = None):
    goal, exact = _goal_masks(d, q)
    region = q.region
    start = q.start
    cap = q.budget_cap if q.budget_cap is not None else max(1, d.node_count)
    full = (1 << d.node_count) - 1
    start_rc = (start & (region if region is not None else full)).bit_count()

    standard_dominant = q.flavor == STANDARD and q.goal != "config"
    if q.flavor == STANDARD and q.goal == "persistent":
        # free removals make persistent and visiting prices coincide; search
        # for the visiting configuration and clean up during extraction
        goal, exact = 1 << d.require_sink(), False

    want_compiled = (compiled is not False) and parents_out is None \
        and (q.flavor == REVERSIBLE or standard_dominant)

    t0 = time.perf_counter()
    expanded = 0
    if (start == goal) if exact else (start & goal == goal):
        return start_rc, expanded, (time.perf_counter() - t0) * 1000.0
    # with a partial region the answer can be 0: every needed pebble may be
    # free; only a full region makes budget 0 trivially hopeless
    lo = start_rc if region is not None and region != full else max(1, start_rc)
    for s in range(lo, cap + 1):
        found = None
        if want_compiled:
            step = _compiled_step(d, q, s, goal, exact, standard_dominant)
            if step is not None:
                found, states = step
        if found is None:
            parents = {} if parents_out is not None else None
            if q.flavor == REVERSIBLE:
                found, states = _explore_reversible(d, s, start, goal, exact, region, parents)
            elif standard_dominant:
                found, states = _explore_standard_dominant(d, s, start, goal, region, parents)
            else:
                found, states = _explore_standard_full(d, s, start, goal, exact, region, parents)
            if found and parents_out is not None:
                parents_out.update(parents)
        expanded += states
        if found:
            return s, expanded, (time.perf_counter() - t0) * 1000.0
    raise CapExceededError(
        f"no {q.flavor} pebbling reaches the {q.goal} goal within budget {cap}",
        lower_bound=cap + 1,
        nodes_expanded=expanded,
    )


def solve(d: Dag, q: PriceQuery, compiled: bool | None = None) -> PriceResult:
    price_, expanded, ms = _run_query(d, q, compiled=compiled)
    return PriceResult(price_, q.flavor, q.goal, expanded, ms)


def price(d: Dag, q: PriceQuery, compiled: bool | None = None) -> int:
    return _run_query(d, q, compiled=compiled)[0]


def price_to_config(d: Dag, target: int, region: int | None = None,
                    start: int = 0, budget_cap: int | None = None) -> int:
    """Min space of a reversible pebbling from `start` to exactly `target`."""
    q = PriceQuery(REVERSIBLE, "config", target=target, region=region,
                   start=start, budget_cap=budget_cap)
    return price(d, q)


def extract_optimal_trace(d: Dag, q: PriceQuery) -> Trace:
    """Replay the search at the optimal budget and walk the parent links."""
    parents: dict = {}
    _run_query(d, q, parents_out=parents)
    # find the goal configuration that was recorded last
    goal, exact = _goal_masks(d, q)
    std_persistent = q.flavor == STANDARD and q.goal == "persistent"
    if std_persistent:
        goal, exact = 1 << d.require_sink(), False
    hit = None
    if (q.start == goal) if exact else (q.start & goal == goal):
        hit = q.start
    else:
        for cfg in parents:
            if (cfg == goal) if exact else (cfg & goal == goal):
                hit = cfg
                break
    assert hit is not None
    moves: list[int] = []
    cur = hit
    while cur != q.start:
        prev, mvs = parents[cur]
        moves.extend(reversed(mvs))
        cur = prev
    moves.reverse()
    if std_persistent:
        zbit = 1 << d.require_sink()
        moves.extend(remove(v) for v in bits(hit & ~zbit))
    t = Trace(q.flavor, moves)
    validate_trace(d, t, start=q.start)
    return t


# ---------------------------------------------------------------------------
# Dymond-Tompa game

@dataclass
class GameState:
    pebbled: int
    challenged: int
    rounds: int


@dataclass
class GameRound:
    placed: int
    challenged_after: int


@dataclass
class GameTranscript:
    rounds: int
    log: list[GameRound] = field(default_factory=list)


class DtStateCapError(CapExceededError):
    pass


def _dt_table(d: Dag, prune_to_ancestors: bool = False,
              state_cap: int = 5_000_000) -> tuple[int, dict]:
    """Game value plus the minimax table, shared with strategy construction.

    States are (pebbled mask, challenged vertex) after the forced first-round
    sink placement; table values are the remaining rounds under optimal play.
    """
    z = d.require_sink()
    pms = d.pred_masks
    n = d.node_count
    anc = ancestor_masks(d) if prune_to_ancestors else None
    memo: dict[tuple[int, int], int] = {}

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10 * n + 100))
    try:
        def rounds(pmask: int, c: int) -> int:
            pm = pms[c]
            if pmask & pm == pm:
                return 0
            key = (pmask, c)
            got = memo.get(key)
            if got is not None:
                return got
            if len(memo) > state_cap:
                raise DtStateCapError(
                    f"Dymond-Tompa search exceeded {state_cap} states",
                    lower_bound=0, nodes_expanded=len(memo))
            pool = anc[c] & ~pmask if anc is not None else ~pmask & ((1 << n) - 1)
            # try predecessors of the challenge first: usually optimal
            order = [v for v in bits(pool & pm)] + [v for v in bits(pool & ~pm)]
            best = n + 1
            for v in order:
                nm = pmask | (1 << v)
                r_jump = rounds(nm, v)
                if r_jump + 1 >= best:
                    continue
                r = 1 + max(r_jump, rounds(nm, c))
                if r < best:
                    best = r
                    if best == 1:
                        break
            memo[key] = best
            return best

        value = 1 + rounds(1 << z, z)
    finally:
        sys.setrecursionlimit(old_limit)
    return value, memo


def dt_price(d: Dag, prune_to_ancestors: bool = False,
             state_cap: int = 5_000_000) -> int:
    """Rounds needed to finish the game: round 1 pebbles the sink, then each
    round the Pebbler places one pebble and the Challenger stays or jumps to
    it; play ends when the challenged vertex's predecessors are all pebbled."""
    return _dt_table(d, prune_to_ancestors, state_cap)[0]


PebblerFn = Callable[[Dag, GameState], int]
ChallengerFn = Callable[[Dag, GameState, int], int]


class IllegalStrategyError(RuntimeError):
    pass


def dt_play(d: Dag, pebbler: PebblerFn, challenger: ChallengerFn,
            round_cap: int = 10_000) -> GameTranscript:
    """Referee one game; legality of every callback choice is enforced."""
    z = d.require_sink()
    pms = d.pred_masks
    pebbled = 1 << z
    challenged = z
    log = [GameRound(z, z)]
    rounds = 1
    while pmask_missing(pms, pebbled, challenged):
        if rounds >= round_cap:
            raise CapExceededError(
                f"game exceeded {round_cap} rounds", lower_bound=rounds)
        state = GameState(pebbled, challenged, rounds)
        v = pebbler(d, state)
        if not 0 <= v < d.node_count or pebbled & (1 << v):
            raise IllegalStrategyError(f"pebbler chose occupied/invalid vertex {v}")
        pebbled |= 1 << v
        state = GameState(pebbled, challenged, rounds)
        c = challenger(d, state, v)
        if c not in (v, challenged):
            raise IllegalStrategyError(
                f"challenger must stay at {challenged} or jump to {v}, chose {c}")
        challenged = c
        rounds += 1
        log.append(GameRound(v, c))
    return GameTranscript(rounds, log)


def pmask_missing(pms, pebbled: int, challenged: int) -> bool:
    pm = pms[challenged]
    return pebbled & pm != pm
