"""Shared oracles and graph corpora for the test suite.

naive_price is an independent reference oracle: a minimax-cost Dijkstra over
configurations, a different algorithm from the solver's budget-iterated DFS.
Agreement between the two routes on every flavor/goal pair is the backbone
correctness check, so neither side should ever be rewritten in terms of the
other.
"""

from __future__ import annotations

import heapq
import itertools
import random

from pebbling.dag import Dag, dag_from_preds
from pebbling.engine import REVERSIBLE, STANDARD
from pebbling.families import (
    binary_tree,
    centipede,
    christmas_tree,
    fixed_price_graph,
    mold,
    path,
    pyramid,
    road,
    teabag,
    turnpike,
)
from pebbling.products import product_reversible
from pebbling.solver import dt_play


# ---------------------------------------------------------------------------
# independent exact price oracle

def naive_price(
    d: Dag,
    flavor: str,
    goal: str,
    target: int | None = None,
    region: int | None = None,
    start: int = 0,
) -> int | None:
    """Exact price by Dijkstra where a path's cost is the max pebble count
    (inside the region) over its configurations. None if unreachable.

    Only for small graphs: the frontier can touch all 2^n configurations.
    """
    n = d.node_count
    pms = d.pred_masks
    full = (1 << n) - 1
    if region is None:
        region = full
    if goal == "config":
        assert target is not None
        hit = lambda c: c == target
    elif goal == "persistent":
        z = d.require_sink()
        if flavor == REVERSIBLE:
            hit = lambda c: c == 1 << z
        else:
            # standard removals are unconditional, so any config containing
            # the sink cleans down to exactly the sink for free
            hit = lambda c: bool(c >> z & 1)
    elif goal == "visiting":
        z = d.require_sink()
        hit = lambda c: bool(c >> z & 1)
    elif goal == "surrounding":
        pm = pms[d.require_sink()]
        hit = lambda c: c & pm == pm
    else:
        raise ValueError(goal)

    reversible = flavor == REVERSIBLE
    start_cost = (start & region).bit_count()
    best = {start: start_cost}
    heap = [(start_cost, start)]
    while heap:
        cost, cfg = heapq.heappop(heap)
        if cost > best.get(cfg, n + 1):
            continue
        if hit(cfg):
            return cost
        for v in range(n):
            b = 1 << v
            pmv = pms[v]
            if cfg & b:
                if reversible and cfg & pmv != pmv:
                    continue
                nc = cfg ^ b
            else:
                if cfg & pmv != pmv:
                    continue
                nc = cfg | b
            ncost = max(cost, (nc & region).bit_count())
            if ncost < best.get(nc, n + 2):
                best[nc] = ncost
                heapq.heappush(heap, (ncost, nc))
    return None


def brute_min_blocking(d: Dag, sources: int, sink: int) -> int:
    """Smallest vertex set meeting every sources->sink path, by subset
    enumeration. Independent of the max-flow route in the dag module."""
    n = d.node_count
    verts = list(range(n))

    def blocked(cut: int) -> bool:
        # DFS forward from uncut sources; blocked iff the sink is unreachable
        todo = [v for v in range(n) if sources >> v & 1 and not cut >> v & 1]
        seen = set(todo)
        while todo:
            x = todo.pop()
            if x == sink:
                return False
            for s in d.succs[x]:
                if s not in seen and not cut >> s & 1:
                    seen.add(s)
                    todo.append(s)
        return True

    for k in range(n + 1):
        for combo in itertools.combinations(verts, k):
            cut = 0
            for v in combo:
                cut |= 1 << v
            if blocked(cut):
                return k
    raise AssertionError("unreachable: cutting everything always blocks")


# ---------------------------------------------------------------------------
# graph corpus

def random_single_sink_dag(rng: random.Random, n: int) -> Dag:
    """Random DAG on vertices 0..n-1 (topological by id) where every vertex
    except n-1 gets at least one successor, making n-1 the unique sink."""
    preds: list[set[int]] = [set() for _ in range(n)]
    for v in range(1, n):
        k = min(v, rng.choice((1, 1, 2, 2, 3)))
        preds[v].update(rng.sample(range(v), k))
    has_succ = [False] * n
    for v in range(n):
        for u in preds[v]:
            has_succ[u] = True
    for v in range(n - 1):
        if not has_succ[v]:
            w = rng.randrange(v + 1, n)
            preds[w].add(v)
            has_succ[v] = True
    return dag_from_preds([tuple(sorted(p)) for p in preds], sink=n - 1)


def corpus_small(max_n: int = 12, seed: int = 20260823) -> list[tuple[str, Dag]]:
    """At least 50 single-sink graphs of at most max_n vertices: every family
    at small parameters plus seeded random DAGs."""
    out: list[tuple[str, Dag]] = []

    def put(name: str, g: Dag) -> None:
        if g.node_count <= max_n:
            g.require_sink()
            out.append((name, g))

    for length in range(9):
        put(f"path{length}", path(length).graph)
    for h in range(4):
        put(f"pyramid{h}", pyramid(h).graph)
    for h in range(3):
        put(f"tree{h}", binary_tree(h).graph)
    for w, length in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)]:
        put(f"road{w}x{length}", road(w, length).graph)
    for h, tail in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)]:
        put(f"teabag{h}t{tail}", teabag(h, tail).graph)
    for length in range(1, 6):
        put(f"centipede{length}", centipede(length).graph)
    for p in range(1, 7):
        put(f"gpyr{p}", fixed_price_graph(p).graph)
    for r in range(1, 5):
        put(f"xmas{r}", christmas_tree(r).graph)
    for toll in range(4):
        put(f"turnpike{toll}", turnpike(toll).graph)
    for name, inner in [("path1", path(1)), ("path2", path(2)),
                        ("pyramid1", pyramid(1))]:
        put(f"mold-{name}", mold(inner).graph)
    put("prod-path1-path1", product_reversible(path(1), path(1)).graph)

    rng = random.Random(seed)
    for i in range(10):
        n = rng.randrange(4, max_n + 1)
        put(f"rand{i}n{n}", random_single_sink_dag(rng, n))
    return out


# ---------------------------------------------------------------------------
# exhaustive Challenger search

def worst_case_rounds(d: Dag, pebbler_factory) -> int:
    """Longest game any Challenger can force against the given Pebbler.

    Walks the full jump/stay decision tree; the pebbler may be stateful, so a
    fresh instance is built for every probed decision string.
    """
    worst = 0
    stack: list[tuple[bool, ...]] = [()]
    seen: set[tuple[bool, ...]] = set()
    while stack:
        prefix = stack.pop()
        if prefix in seen:
            continue
        seen.add(prefix)
        script = list(prefix)
        decisions: list[bool] = []

        def challenger(d_: Dag, gs, v: int) -> int:
            jump = script.pop(0) if script else False
            decisions.append(jump)
            return v if jump else gs.challenged

        t = dt_play(d, pebbler_factory(), challenger)
        worst = max(worst, t.rounds)
        for i in range(len(prefix), len(decisions)):
            stack.append(tuple(decisions[:i]) + (True,))
    return worst
