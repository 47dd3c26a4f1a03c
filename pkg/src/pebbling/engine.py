"""Pebbling moves, traces, and replay validation.

A configuration is an int bitmask over vertex ids. A move is an int
(vertex << 1) | 1 for a placement and (vertex << 1) for a removal; traces
store lists of these so multi-million-move certificates stay compact.

Standard rules: place v when every predecessor is pebbled, remove freely.
Reversible rules: removal is as constrained as placement, so a legal move
sequence is legal backwards with placements and removals exchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from pebbling.dag import Dag, bits, mask_of

try:
    import numpy as _np

    from pebbling import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

# replay() hands move lists at least this long to the compiled kernel
_COMPILED_REPLAY_MIN = 100_000

STANDARD = "standard"
REVERSIBLE = "reversible"
FLAVORS = (STANDARD, REVERSIBLE)

GOAL_PERSISTENT = "persistent"
GOAL_VISITING = "visiting"
GOAL_SURROUNDING = "surrounding"
GOAL_OTHER = "other"


def place(v: int) -> int:
    return (v << 1) | 1


def remove(v: int) -> int:
    return v << 1


def move_vertex(mv: int) -> int:
    return mv >> 1


def is_place(mv: int) -> bool:
    return bool(mv & 1)


def flip_moves(moves: Iterable[int]) -> list[int]:
    """Reverse the order and exchange placements with removals."""
    return [mv ^ 1 for mv in reversed(list(moves))]


def format_move(mv: int) -> str:
    return ("+" if mv & 1 else "-") + str(mv >> 1)


def parse_move(text: str) -> int:
    text = text.strip()
    if not text or text[0] not in "+-":
        raise ValueError(f"move must look like +3 or -3, got {text!r}")
    v = int(text[1:])
    return place(v) if text[0] == "+" else remove(v)


class IllegalMoveError(ValueError):
    """A move violated the active rule set.

    rule is one of: occupied, absent, preds-place, preds-remove, range.
    index is the position within a replayed trace, or None for single moves.
    """

    def __init__(self, rule: str, vertex: int, flavor: str, index: int | None = None):
        self.rule = rule
        self.vertex = vertex
        self.flavor = flavor
        self.index = index
        at = "" if index is None else f" at step {index}"
        detail = {
            "occupied": "placement on an already pebbled vertex",
            "absent": "removal from an empty vertex",
            "preds-place": "placement with an unpebbled predecessor",
            "preds-remove": "reversible removal with an unpebbled predecessor",
            "range": "vertex id out of range",
        }[rule]
        super().__init__(f"{flavor} pebbling: {detail} (vertex {vertex}){at}")


class TraceFormatError(ValueError):
    pass


@dataclass
class Trace:
    """A move sequence under one rule set; space and time come from replay."""

    flavor: str
    moves: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class TraceStats:
    space: int
    time: int
    final: int  # configuration mask
    region_space: int | None = None

    def final_vertices(self) -> frozenset[int]:
        return frozenset(bits(self.final))


def apply_move(d: Dag, config: int, mv: int, flavor: str, index: int | None = None) -> int:
    """One legality-checked move; returns the next configuration mask."""
    v = mv >> 1
    if not 0 <= v < d.node_count:
        raise IllegalMoveError("range", v, flavor, index)
    bit = 1 << v
    pm = d.pred_masks[v]
    if mv & 1:
        if config & bit:
            raise IllegalMoveError("occupied", v, flavor, index)
        if config & pm != pm:
            raise IllegalMoveError("preds-place", v, flavor, index)
        return config | bit
    if not config & bit:
        raise IllegalMoveError("absent", v, flavor, index)
    if flavor == REVERSIBLE and config & pm != pm:
        raise IllegalMoveError("preds-remove", v, flavor, index)
    return config ^ bit


def replay(
    d: Dag,
    moves: Iterable[int],
    flavor: str,
    start: int = 0,
    region: int | None = None,
) -> TraceStats:
    """Replay from `start` (a configuration mask), checking every move.

    Raises IllegalMoveError with the failing index on the first bad move.
    With a region mask the peak of |config & region| is tracked as well.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    reversible = flavor == REVERSIBLE
    if (
        _kernels is not None
        and region is None
        and isinstance(moves, list)
        and len(moves) >= _COMPILED_REPLAY_MIN
    ):
        return _replay_compiled(d, moves, reversible, flavor, start)
    pred_masks = d.pred_masks
    n = d.node_count
    config = start
    space = config.bit_count()
    rpeak = (config & region).bit_count() if region is not None else 0
    time = 0
    for i, mv in enumerate(moves):
        v = mv >> 1
        if not 0 <= v < n:
            raise IllegalMoveError("range", v, flavor, i)
        bit = 1 << v
        pm = pred_masks[v]
        if mv & 1:
            if config & bit:
                raise IllegalMoveError("occupied", v, flavor, i)
            if config & pm != pm:
                raise IllegalMoveError("preds-place", v, flavor, i)
            config |= bit
            time += 1
            c = config.bit_count()
            if c > space:
                space = c
            if region is not None:
                rc = (config & region).bit_count()
                if rc > rpeak:
                    rpeak = rc
        else:
            if not config & bit:
                raise IllegalMoveError("absent", v, flavor, i)
            if reversible and config & pm != pm:
                raise IllegalMoveError("preds-remove", v, flavor, i)
            config ^= bit
    return TraceStats(space, time, config, rpeak if region is not None else None)


_REPLAY_RULE_CODES = {
    1: "range", 2: "occupied", 3: "preds-place", 4: "absent", 5: "preds-remove",
}


def _replay_compiled(d: Dag, moves: list[int], reversible: bool,
                     flavor: str, start: int) -> TraceStats:
    """Kernel-backed replay for long traces; graphs of any vertex count."""
    n = d.node_count
    indptr = _np.zeros(n + 1, dtype=_np.int64)
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(d.preds[v])
    indices = _np.fromiter(
        (u for v in range(n) for u in d.preds[v]), dtype=_np.int64,
        count=int(indptr[n]))
    mv_arr = _np.fromiter(moves, dtype=_np.int64, count=len(moves))
    config = _np.zeros(n, dtype=_np.uint8)
    for v in bits(start):
        config[v] = 1
    status, idx, peak, time = _kernels.replay_csr(
        indptr, indices, mv_arr, reversible, config)
    if status:
        raise IllegalMoveError(
            _REPLAY_RULE_CODES[status], int(mv_arr[idx]) >> 1, flavor, int(idx))
    final = int.from_bytes(
        _np.packbits(config, bitorder="little").tobytes(), "little")
    return TraceStats(int(peak), int(time), final)


def validate_trace(d: Dag, trace: Trace, start: int = 0) -> TraceStats:
    """Full legality check and summary for a trace, replayed from `start`."""
    return replay(d, trace.moves, trace.flavor, start=start)


def region_space(d: Dag, trace: Trace, region: Iterable[int] | int, start: int = 0) -> int:
    """Peak number of pebbles inside the region over the whole replay."""
    rmask = region if isinstance(region, int) else mask_of(region)
    stats = replay(d, trace.moves, trace.flavor, start=start, region=rmask)
    assert stats.region_space is not None
    return stats.region_space


def classify_goal(d: Dag, final: int) -> str:
    """What kind of pebbling of the designated sink a final config witnesses."""
    z = d.require_sink()
    zbit = 1 << z
    if final == zbit:
        return GOAL_PERSISTENT
    if final & zbit:
        return GOAL_VISITING
    pm = d.pred_masks[z]
    if final & pm == pm:
        return GOAL_SURROUNDING
    return GOAL_OTHER


def classify_trace(d: Dag, trace: Trace, start: int = 0) -> str:
    return classify_goal(d, validate_trace(d, trace, start=start).final)


def reverse_trace(trace: Trace) -> Trace:
    """Time-reverse a reversible trace; undefined for the standard flavor."""
    if trace.flavor != REVERSIBLE:
        raise ValueError("only reversible traces can be reversed")
    return Trace(REVERSIBLE, flip_moves(trace.moves))


def configs_of(d: Dag, trace: Trace, start: int = 0) -> list[int]:
    """All configurations visited, including the start; len == time+... moves+1."""
    out = [start]
    config = start
    for i, mv in enumerate(trace.moves):
        config = apply_move(d, config, mv, trace.flavor, i)
        out.append(config)
    return out


# ---------------------------------------------------------------------------
# trace text format

def format_trace(trace: Trace) -> str:
    lines = [f"trace {trace.flavor}"]
    lines.extend(format_move(mv) for mv in trace.moves)
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    flavor: str | None = None
    moves: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if flavor is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "trace" or parts[1] not in FLAVORS:
                raise TraceFormatError(
                    f"line {lineno}: expected 'trace standard' or 'trace reversible'"
                )
            flavor = parts[1]
            continue
        try:
            moves.append(parse_move(line))
        except ValueError as e:
            raise TraceFormatError(f"line {lineno}: {e}") from e
    if flavor is None:
        raise TraceFormatError("missing 'trace <flavor>' header")
    return Trace(flavor, moves)
