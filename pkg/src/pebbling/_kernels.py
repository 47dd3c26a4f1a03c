"""Compiled (numba) variants of the budget-bounded search kernels.

These mirror the pure-Python kernels in solver.py move for move; the solver
picks them automatically for graphs up to 63 vertices when no parent links
are needed, and the test suite cross-checks both implementations. Visited
sets live in open-addressing uint64 tables (8 bytes per state), which keeps
multi-million-state exhaustions inside desk-scale memory.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - environment without numba
    AVAILABLE = False

    def njit(*a, **k):  # type: ignore
        def deco(f):
            return f

        return deco


U64 = np.uint64
_EMPTY = U64(0xFFFFFFFFFFFFFFFF)
_MULT = U64(0x9E3779B97F4A7C15)

# search outcome codes
FOUND = 1
EXHAUSTED = 0
CAPPED = -1


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> U64(1)) & U64(0x5555555555555555))
    x = (x & U64(0x3333333333333333)) + ((x >> U64(2)) & U64(0x3333333333333333))
    x = (x + (x >> U64(4))) & U64(0x0F0F0F0F0F0F0F0F)
    return (x * U64(0x0101010101010101)) >> U64(56)


@njit(cache=True, inline="always")
def _mix(x):
    # splitmix64 finalizer: low output bits depend on every input bit
    x = (x ^ (x >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> U64(27))) * U64(0x94D049BB133111EB)
    return x ^ (x >> U64(31))


@njit(cache=True)
def _grow_table(table):
    cap = table.shape[0]
    new = np.full(cap * 2, _EMPTY, U64)
    mask = U64(cap * 2 - 1)
    for i in range(cap):
        x = table[i]
        if x == _EMPTY:
            continue
        j = _mix(x) & mask
        while new[j] != _EMPTY:
            j = (j + U64(1)) & mask
        new[j] = x
    return new


@njit(cache=True, inline="always")
def _probe(table, x):
    """Return slot index if x should be inserted there, or -1 if present."""
    mask = U64(table.shape[0] - 1)
    j = _mix(x) & mask
    while True:
        cur = table[j]
        if cur == _EMPTY:
            return np.int64(j)
        if cur == x:
            return np.int64(-1)
        j = (j + U64(1)) & mask


@njit(cache=True)
def search_reversible(pms, s, start, goal, exact, region, state_cap):
    """Explore all configs reachable at region-budget s under reversible
    moves; returns (code, states). Sentinel config ~0 is never reachable
    because graphs here have at most 63 vertices."""
    n = pms.shape[0]
    table = np.full(np.int64(1) << 14, _EMPTY, U64)
    count = np.int64(1)
    slot = _probe(table, start)
    table[slot] = start
    stack = np.empty(1 << 12, U64)
    stack[0] = start
    sp = np.int64(1)
    budget = U64(s)
    one = U64(1)
    while sp > 0:
        sp -= 1
        cfg = stack[sp]
        rc = _popcount(cfg & region)
        room = rc < budget
        for v in range(n):
            pm = pms[v]
            if cfg & pm != pm:
                continue
            b = one << U64(v)
            if cfg & b:
                nc = cfg ^ b
            elif room or (b & region) == U64(0):
                nc = cfg | b
            else:
                continue
            slot = _probe(table, nc)
            if slot < 0:
                continue
            table[slot] = nc
            count += 1
            if exact:
                if nc == goal:
                    return FOUND, count
            elif nc & goal == goal:
                return FOUND, count
            if count > state_cap:
                return CAPPED, count
            if count * 10 >= table.shape[0] * 7:
                table = _grow_table(table)
            if sp >= stack.shape[0]:
                bigger = np.empty(stack.shape[0] * 2, U64)
                bigger[: stack.shape[0]] = stack
                stack = bigger
            stack[sp] = nc
            sp += 1
    return EXHAUSTED, count


@njit(cache=True)
def search_standard_dominant(pms, s, start, goal, region, state_cap):
    """Standard flavor, superset goals only: placements plus a single
    budget-freeing removal, relying on superset dominance."""
    n = pms.shape[0]
    table = np.full(np.int64(1) << 14, _EMPTY, U64)
    count = np.int64(1)
    slot = _probe(table, start)
    table[slot] = start
    stack = np.empty(1 << 12, U64)
    stack[0] = start
    sp = np.int64(1)
    budget = U64(s)
    one = U64(1)
    zero = U64(0)
    while sp > 0:
        sp -= 1
        cfg = stack[sp]
        rc = _popcount(cfg & region)
        room = rc < budget
        for v in range(n):
            b = one << U64(v)
            pm = pms[v]
            if cfg & b or cfg & pm != pm:
                continue
            if room or (b & region) == zero:
                drop = zero  # single successor: place v without removing
            else:
                drop = cfg & region & ~pm
                if drop == zero:
                    continue
            while True:
                if drop == zero:
                    nc = cfg | b
                else:
                    xb = drop & (U64(0) - drop)
                    drop ^= xb
                    nc = (cfg ^ xb) | b
                slot = _probe(table, nc)
                if slot >= 0:
                    table[slot] = nc
                    count += 1
                    if nc & goal == goal:
                        return FOUND, count
                    if count > state_cap:
                        return CAPPED, count
                    if count * 10 >= table.shape[0] * 7:
                        table = _grow_table(table)
                    if sp >= stack.shape[0]:
                        bigger = np.empty(stack.shape[0] * 2, U64)
                        bigger[: stack.shape[0]] = stack
                        stack = bigger
                    stack[sp] = nc
                    sp += 1
                if drop == zero:
                    break
    return EXHAUSTED, count


@njit(cache=True)
def search_reversible_bitset(pms, s, start, goal, exact):
    """Reversible search with a flat visited bitset instead of a hash table.

    Viable up to ~33 vertices (2^n bits of memory); every vertex counts
    toward the budget (no region support). Returns (code, states)."""
    n = pms.shape[0]
    visited = np.zeros(np.int64(1) << np.int64(max(n - 3, 3)), np.uint8)
    visited[start >> U64(3)] = np.uint8(1) << (start & U64(7))
    stack = np.empty(1 << 16, U64)
    stack[0] = start
    sp = np.int64(1)
    count = np.int64(1)
    budget = U64(s)
    one = U64(1)
    while sp > 0:
        sp -= 1
        cfg = stack[sp]
        room = _popcount(cfg) < budget
        for v in range(n):
            pm = pms[v]
            if cfg & pm != pm:
                continue
            b = one << U64(v)
            if cfg & b:
                nc = cfg ^ b
            elif room:
                nc = cfg | b
            else:
                continue
            byte = nc >> U64(3)
            bit = np.uint8(1) << (nc & U64(7))
            if visited[byte] & bit:
                continue
            visited[byte] |= bit
            count += 1
            if exact:
                if nc == goal:
                    return FOUND, count
            elif nc & goal == goal:
                return FOUND, count
            if sp >= stack.shape[0]:
                bigger = np.empty(stack.shape[0] * 2, U64)
                bigger[: stack.shape[0]] = stack
                stack = bigger
            stack[sp] = nc
            sp += 1
    return EXHAUSTED, count


@njit(cache=True)
def replay_csr(indptr, indices, moves, reversible, config):
    """Replay a move array over a CSR predecessor table of any size.

    config is modified in place (uint8 per vertex). Returns
    (status, failing_index, peak, placements): status 0 = legal, else the
    rule codes 1 range / 2 occupied / 3 preds-place / 4 absent /
    5 preds-remove with the index of the offending move.
    """
    n = config.shape[0]
    space = 0
    for v in range(n):
        if config[v]:
            space += 1
    peak = space
    time = 0
    for i in range(moves.shape[0]):
        mv = moves[i]
        v = mv >> 1
        if v < 0 or v >= n:
            return 1, i, peak, time
        if mv & 1:
            if config[v]:
                return 2, i, peak, time
            for k in range(indptr[v], indptr[v + 1]):
                if not config[indices[k]]:
                    return 3, i, peak, time
            config[v] = 1
            space += 1
            time += 1
            if space > peak:
                peak = space
        else:
            if not config[v]:
                return 4, i, peak, time
            if reversible:
                for k in range(indptr[v], indptr[v + 1]):
                    if not config[indices[k]]:
                        return 5, i, peak, time
            config[v] = 0
            space -= 1
    return 0, -1, peak, time
