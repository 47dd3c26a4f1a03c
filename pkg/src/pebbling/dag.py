"""Single-sink DAG core.

Vertices are dense ids 0..n-1. Predecessor lists are the source of truth;
successors and bitmask views are derived lazily. Vertex sets that feed the
search code are encoded as Python int bitmasks (bit v = vertex v).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator


class CycleError(ValueError):
    """Raised when an operation needs a topological order and none exists."""


class GraphFormatError(ValueError):
    """Raised on malformed text-format graph input."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions of a vertex mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Dag:
    """Immutable DAG given by per-vertex predecessor tuples.

    labels is an optional id -> name map used for debugging and DOT export.
    sink, when set, marks the distinguished output vertex; generators always
    set it for single-sink graphs and leave it None otherwise.
    """

    preds: tuple[tuple[int, ...], ...]
    labels: dict[int, str] = field(default_factory=dict)
    sink: int | None = None

    @property
    def node_count(self) -> int:
        return len(self.preds)

    @cached_property
    def pred_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(p) for p in self.preds)

    @cached_property
    def succs(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.node_count)]
        for v, ps in enumerate(self.preds):
            for u in ps:
                out[u].append(v)
        return tuple(tuple(s) for s in out)

    @cached_property
    def sources_mask(self) -> int:
        return mask_of(v for v in range(self.node_count) if not self.preds[v])

    @cached_property
    def sinks(self) -> tuple[int, ...]:
        """Vertices with no successors."""
        return tuple(v for v in range(self.node_count) if not self.succs[v])

    @cached_property
    def topo_order(self) -> tuple[int, ...]:
        """Kahn order; raises CycleError when the edge relation has a cycle."""
        n = self.node_count
        indeg = [len(p) for p in self.preds]
        ready = deque(v for v in range(n) if indeg[v] == 0)
        order: list[int] = []
        while ready:
            u = ready.popleft()
            order.append(u)
            for v in self.succs[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        if len(order) != n:
            stuck = [v for v in range(n) if indeg[v] > 0]
            raise CycleError(f"graph has a cycle through vertices {stuck[:8]}")
        return tuple(order)

    def is_acyclic(self) -> bool:
        try:
            self.topo_order
        except CycleError:
            return False
        return True

    def full_mask(self) -> int:
        return (1 << self.node_count) - 1

    def require_sink(self) -> int:
        if self.sink is None:
            raise ValueError("graph has no designated sink")
        return self.sink


def dag_from_preds(
    preds: Iterable[Iterable[int]],
    labels: dict[int, str] | None = None,
    sink: int | None = None,
) -> Dag:
    """Build a Dag, deduplicating and sorting each predecessor list."""
    norm = tuple(tuple(sorted(set(p))) for p in preds)
    n = len(norm)
    for v, ps in enumerate(norm):
        for u in ps:
            if not 0 <= u < n:
                raise ValueError(f"vertex {v} has out-of-range predecessor {u}")
    if sink is not None and not 0 <= sink < n:
        raise ValueError(f"sink {sink} out of range")
    return Dag(norm, dict(labels or {}), sink)


def dag_from_edges(
    n: int,
    edges: Iterable[tuple[int, int]],
    labels: dict[int, str] | None = None,
    sink: int | None = None,
) -> Dag:
    preds: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        preds[v].append(u)
    return dag_from_preds(preds, labels, sink)


class GraphBuilder:
    """Mutable helper used by the generators; freeze() yields a Dag."""

    def __init__(self) -> None:
        self._preds: list[list[int]] = []
        self._labels: dict[int, str] = {}
        self.sink: int | None = None

    def add(self, label: str | None = None) -> int:
        v = len(self._preds)
        self._preds.append([])
        if label is not None:
            self._labels[v] = label
        return v

    def add_many(self, count: int) -> list[int]:
        return [self.add() for _ in range(count)]

    def edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if u not in self._preds[v]:
            self._preds[v].append(u)

    def label(self, v: int, name: str) -> None:
        self._labels[v] = name

    @property
    def node_count(self) -> int:
        return len(self._preds)

    def embed(
        self,
        other: Dag,
        identify: dict[int, int] | None = None,
    ) -> list[int]:
        """Copy `other` into this builder and return the id translation list.

        identify maps vertices of `other` onto existing vertices here; those
        keep their existing id and gain the copied incoming edges. Everything
        else gets a fresh id.
        """
        identify = identify or {}
        trans: list[int] = []
        for v in range(other.node_count):
            if v in identify:
                trans.append(identify[v])
            else:
                trans.append(self.add(other.labels.get(v)))
        for v in range(other.node_count):
            for u in other.preds[v]:
                self.edge(trans[u], trans[v])
        return trans

    def freeze(self, sink: int | None = None) -> Dag:
        if sink is not None:
            self.sink = sink
        d = dag_from_preds(self._preds, self._labels, self.sink)
        d.topo_order  # fail fast on accidental cycles
        return d


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    code: str
    vertex: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def validate(
    d: Dag,
    require_single_sink: bool = False,
    max_fanin: int | None = None,
) -> ValidationReport:
    """Structural checks: acyclicity, optional unique sink, fan-in bound."""
    problems: list[Violation] = []
    acyclic = True
    try:
        d.topo_order
    except CycleError as e:
        acyclic = False
        problems.append(Violation("cycle", None, str(e)))
    if max_fanin is not None:
        for v, ps in enumerate(d.preds):
            if len(ps) > max_fanin:
                problems.append(
                    Violation("fanin", v, f"vertex {v} has fan-in {len(ps)} > {max_fanin}")
                )
    if acyclic:
        outless = d.sinks
        if require_single_sink:
            if len(outless) != 1:
                problems.append(
                    Violation(
                        "multi-sink",
                        None,
                        f"expected a unique sink, found {len(outless)}: {list(outless)[:8]}",
                    )
                )
            elif d.sink is not None and d.sink != outless[0]:
                problems.append(
                    Violation(
                        "sink-mismatch",
                        d.sink,
                        f"designated sink {d.sink} but {outless[0]} is the out-degree-0 vertex",
                    )
                )
        if d.sink is not None and d.succs[d.sink]:
            problems.append(
                Violation("sink-outdeg", d.sink, f"designated sink {d.sink} has successors")
            )
    return ValidationReport(not problems, tuple(problems))


# ---------------------------------------------------------------------------
# reachability

def ancestors(d: Dag, v: int, proper: bool = False) -> frozenset[int]:
    """All u with a directed path u -> v; v itself included unless proper."""
    seen = {v}
    todo = [v]
    while todo:
        x = todo.pop()
        for u in d.preds[x]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    if proper:
        seen.discard(v)
    return frozenset(seen)


def descendants(d: Dag, v: int, proper: bool = False) -> frozenset[int]:
    seen = {v}
    todo = [v]
    while todo:
        x = todo.pop()
        for u in d.succs[x]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    if proper:
        seen.discard(v)
    return frozenset(seen)


def ancestors_of_set(d: Dag, vs: Iterable[int]) -> frozenset[int]:
    out: set[int] = set()
    for v in vs:
        out |= ancestors(d, v)
    return frozenset(out)


def ancestor_masks(d: Dag) -> list[int]:
    """Per-vertex mask of proper ancestors, one pass in topological order."""
    masks = [0] * d.node_count
    for v in d.topo_order:
        m = 0
        for u in d.preds[v]:
            m |= masks[u] | (1 << u)
        masks[v] = m
    return masks


# ---------------------------------------------------------------------------
# minimum blocking sets via vertex-splitting max flow

def _blocks(d: Dag, blocked: set[int], targets: set[int]) -> bool:
    """True iff every path from a source to a target meets `blocked`."""
    todo = [v for v in range(d.node_count) if not d.preds[v] and v not in blocked]
    seen = set(todo)
    while todo:
        u = todo.pop()
        if u in targets:
            return False
        for w in d.succs[u]:
            if w not in blocked and w not in seen:
                seen.add(w)
                todo.append(w)
    # sources that are themselves targets must be blocked directly
    return True


def min_blocking_set(d: Dag, targets: Iterable[int]) -> frozenset[int]:
    """Minimum-cardinality vertex set meeting every source-to-target path.

    Standard construction: split each vertex v into v_in -> v_out with unit
    capacity, give original edges infinite capacity, and run max flow from a
    super-source over the sources to a super-sink behind the targets. The cut
    is read off the residual reachability.
    """
    tset = set(targets)
    for t in tset:
        if not 0 <= t < d.node_count:
            raise ValueError(f"target {t} out of range")
    if not tset:
        return frozenset()
    n = d.node_count
    # node ids in the flow network: v_in = 2v, v_out = 2v+1, S = 2n, T = 2n+1
    S, T = 2 * n, 2 * n + 1
    inf = n + 1
    cap: dict[tuple[int, int], int] = {}
    adj: dict[int, list[int]] = {S: [], T: []}

    def add(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            cap[(a, b)] = 0
            cap[(b, a)] = cap.get((b, a), 0)
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        cap[(a, b)] += c

    for v in range(n):
        add(2 * v, 2 * v + 1, 1)
        for u in d.preds[v]:
            add(2 * u + 1, 2 * v, inf)
        if not d.preds[v]:
            add(S, 2 * v, inf)
        if v in tset:
            add(2 * v + 1, T, inf)

    # Edmonds-Karp; value is at most n so this stays cheap
    while True:
        parent = {S: S}
        q = deque([S])
        while q and T not in parent:
            a = q.popleft()
            for b in adj.get(a, ()):
                if b not in parent and cap.get((a, b), 0) > 0:
                    parent[b] = a
                    q.append(b)
        if T not in parent:
            break
        path = [T]
        while path[-1] != S:
            path.append(parent[path[-1]])
        path.reverse()
        aug = min(cap[(path[i], path[i + 1])] for i in range(len(path) - 1))
        for i in range(len(path) - 1):
            a, b = path[i], path[i + 1]
            cap[(a, b)] -= aug
            cap[(b, a)] += aug

    reach = {S}
    q = deque([S])
    while q:
        a = q.popleft()
        for b in adj.get(a, ()):
            if b not in reach and cap.get((a, b), 0) > 0:
                reach.add(b)
                q.append(b)
    cut = frozenset(v for v in range(n) if 2 * v in reach and 2 * v + 1 not in reach)
    assert _blocks(d, set(cut), tset), "max-flow cut failed to block"
    return cut


# ---------------------------------------------------------------------------
# text formats

def format_graph(d: Dag) -> str:
    """Line-based text format: dag <n>, then edge/label/sink lines."""
    lines = [f"dag {d.node_count}"]
    for v in range(d.node_count):
        for u in d.preds[v]:
            lines.append(f"edge {u} {v}")
    for v in sorted(d.labels):
        lines.append(f"label {v} {d.labels[v]}")
    if d.sink is not None:
        lines.append(f"sink {d.sink}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Dag:
    n: int | None = None
    edges: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    sink: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "dag":
                if n is not None:
                    raise GraphFormatError(f"line {lineno}: duplicate dag header")
                n = int(parts[1])
            elif kind == "edge":
                edges.append((int(parts[1]), int(parts[2])))
            elif kind == "label":
                labels[int(parts[1])] = " ".join(parts[2:])
            elif kind == "sink":
                sink = int(parts[1])
            else:
                raise GraphFormatError(f"line {lineno}: unknown directive {kind!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, GraphFormatError):
                raise
            raise GraphFormatError(f"line {lineno}: malformed {kind!r} line") from e
    if n is None:
        raise GraphFormatError("missing 'dag <n>' header")
    try:
        return dag_from_edges(n, edges, labels, sink)
    except ValueError as e:
        raise GraphFormatError(str(e)) from e


def format_anchors(anchors: dict[str, int]) -> str:
    return "".join(f"anchor {name} {v}\n" for name, v in sorted(anchors.items()))


def parse_anchors(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "anchor":
            raise GraphFormatError(f"line {lineno}: expected 'anchor <name> <v>'")
        out[parts[1]] = int(parts[2])
    return out


def to_dot(d: Dag, anchors: dict[str, int] | None = None, name: str = "dag") -> str:
    """GraphViz export; anchor names decorate the matching vertices."""
    by_vertex: dict[int, list[str]] = {}
    for aname, v in (anchors or {}).items():
        by_vertex.setdefault(v, []).append(aname)
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for v in range(d.node_count):
        tags = []
        if v in d.labels:
            tags.append(d.labels[v])
        tags.extend(sorted(by_vertex.get(v, ())))
        text = f"{v}" if not tags else f"{v}\\n{','.join(tags)}"
        shape = ' shape=doublecircle' if v == d.sink else ""
        lines.append(f'  n{v} [label="{text}"{shape}];')
    for v in range(d.node_count):
        for u in d.preds[v]:
            lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
