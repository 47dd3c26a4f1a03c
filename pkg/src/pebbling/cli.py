"""Command line front end for the pebbling toolkit.

Subcommands: gen (graph files), solve (price queries), validate (trace
checking), strategy (certified trace emission), reduce (QBF to graph),
play (Pebbler/Challenger games), export (DOT text).

Exit codes: 0 success, 2 usage, 3 validation failure, 4 cap exceeded.
Results go to stdout as JSON or line-based text; machine-readable error
objects go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pebbling import families, products
from pebbling.dag import (
    Dag,
    GraphFormatError,
    format_anchors,
    format_graph,
    mask_of,
    parse_anchors,
    parse_graph,
    to_dot,
    validate,
)
from pebbling.engine import (
    REVERSIBLE,
    STANDARD,
    IllegalMoveError,
    Trace,
    TraceFormatError,
    classify_goal,
    format_trace,
    parse_trace,
    validate_trace,
)
from pebbling.families import FAMILY_ARITIES, GadgetHandle, build_family
from pebbling.qbf import QbfFormatError, parse_qdimacs
from pebbling.reduction import qbf_reduction
from pebbling.solver import (
    CapExceededError,
    PriceQuery,
    dt_play,
    dt_price,
    solve,
)
from pebbling import strategies

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_CAP = 4

GOALS = ("persistent", "visiting", "surrounding", "config")

# node-count ceiling for --amplify, which squares the graph each step
AMPLIFY_NODE_CAP = 2_000_000


class CliError(Exception):
    def __init__(self, code: int, **payload):
        super().__init__(payload.get("error", "error"))
        self.code = code
        self.payload = payload


def _fail(code: int, **payload) -> None:
    raise CliError(code, **payload)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        _fail(EXIT_USAGE, error="unreadable-file", path=path, detail=str(e))
        raise AssertionError  # unreachable


def _load_graph(path: str) -> tuple[Dag, dict[str, int]]:
    try:
        d = parse_graph(_read_text(path))
    except GraphFormatError as e:
        _fail(EXIT_INVALID, error="bad-graph", path=path, detail=str(e))
        raise AssertionError
    anchors: dict[str, int] = {}
    if path != "-":
        sidecar = Path(path + ".anchors")
        if sidecar.exists():
            try:
                anchors = parse_anchors(sidecar.read_text())
            except GraphFormatError as e:
                _fail(EXIT_INVALID, error="bad-anchors",
                      path=str(sidecar), detail=str(e))
    return d, anchors


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------
# family specs: a name plus its parameters, composable for mold/product/qbf


def _parse_family_spec(tokens: list[str]) -> tuple[GadgetHandle, int]:
    """Parse one (possibly nested) family spec; returns (handle, consumed)."""
    if not tokens:
        _fail(EXIT_USAGE, error="missing-family")
    name = tokens[0]
    if name == "mold":
        inner, used = _parse_family_spec(tokens[1:])
        return families.mold(inner), used + 1
    if name in ("product-rev", "product-std"):
        f1, u1 = _parse_family_spec(tokens[1:])
        f2, u2 = _parse_family_spec(tokens[1 + u1:])
        build = (products.product_reversible if name == "product-rev"
                 else products.product_standard)
        return build(f1, f2), u1 + u2 + 1
    if name == "qbf":
        if len(tokens) < 2:
            _fail(EXIT_USAGE, error="missing-formula", family="qbf")
        phi = _load_formula(tokens[1])
        return qbf_reduction(phi).handle, 2
    if name not in FAMILY_ARITIES:
        _fail(EXIT_USAGE, error="unknown-family", family=name,
              known=sorted(FAMILY_ARITIES) + ["mold", "product-rev", "product-std", "qbf"])
    arity = FAMILY_ARITIES[name]
    params = tokens[1 : 1 + arity]
    if len(params) < arity or not all(_is_int(p) for p in params):
        _fail(EXIT_USAGE, error="bad-family-params", family=name, arity=arity)
    try:
        return build_family(name, [int(p) for p in params]), arity + 1
    except ValueError as e:
        _fail(EXIT_USAGE, error="bad-family-params", family=name, detail=str(e))
        raise AssertionError


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False


def _load_formula(path: str):
    try:
        return parse_qdimacs(_read_text(path))
    except QbfFormatError as e:
        _fail(EXIT_INVALID, error="bad-qdimacs", path=path,
              rule=e.rule, detail=str(e))
        raise AssertionError


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    handle, used = _parse_family_spec(args.spec)
    if used != len(args.spec):
        _fail(EXIT_USAGE, error="trailing-arguments", extra=args.spec[used:])
    text = format_graph(handle.graph)
    _write_out(text, args.out)
    if args.out is not None and handle.anchors:
        Path(args.out + ".anchors").write_text(format_anchors(handle.anchors))
    return EXIT_OK


def _region_mask(path: str | None) -> int | None:
    if path is None:
        return None
    toks = [t for t in _read_text(path).split() if not t.startswith("#")]
    if not all(_is_int(t) for t in toks):
        _fail(EXIT_INVALID, error="bad-region", path=path)
    return mask_of(int(t) for t in toks)


def _cmd_solve(args) -> int:
    d, _ = _load_graph(args.graph)
    label = args.graph if args.graph != "-" else "stdin"
    if args.flavor == "dt":
        if args.goal != "persistent":
            _fail(EXIT_USAGE, error="bad-goal",
                  detail="the game flavor only prices the persistent goal")
        try:
            value = dt_price(d, state_cap=args.cap or 5_000_000)
        except CapExceededError as e:
            _fail(EXIT_CAP, error="cap-exceeded",
                  lower_bound=e.lower_bound, detail=str(e))
        _emit_json({"graph": label, "flavor": "dt", "goal": "persistent",
                    "price": value})
        return EXIT_OK
    target = None
    if args.target is not None:
        if args.goal != "config":
            _fail(EXIT_USAGE, error="bad-goal",
                  detail="--target only makes sense with --goal config")
        target = mask_of(int(t) for t in args.target.split(",") if t)
    elif args.goal == "config":
        _fail(EXIT_USAGE, error="bad-goal", detail="--goal config needs --target")
    q = PriceQuery(flavor=args.flavor, goal=args.goal, target=target,
                   region=_region_mask(args.region), budget_cap=args.cap)
    try:
        result = solve(d, q)
    except CapExceededError as e:
        _fail(EXIT_CAP, error="cap-exceeded",
              lower_bound=e.lower_bound, detail=str(e))
        raise AssertionError
    except ValueError as e:
        _fail(EXIT_USAGE, error="bad-query", detail=str(e))
        raise AssertionError
    _emit_json(result.record(label, region=args.region is not None))
    return EXIT_OK


def _cmd_validate(args) -> int:
    d, _ = _load_graph(args.graph)
    try:
        trace = parse_trace(_read_text(args.trace))
    except TraceFormatError as e:
        _fail(EXIT_INVALID, error="bad-trace", path=args.trace, detail=str(e))
        raise AssertionError
    try:
        stats = validate_trace(d, trace)
    except IllegalMoveError as e:
        _fail(EXIT_INVALID, error="illegal-move", index=e.index,
              rule=e.rule, vertex=e.vertex, flavor=e.flavor)
        raise AssertionError
    _emit_json({
        "flavor": trace.flavor,
        "space": stats.space,
        "time": stats.time,
        "final": sorted(stats.final_vertices()),
        "goal": classify_goal(d, stats.final) if d.sink is not None else "other",
    })
    return EXIT_OK


def _parse_strategy_spec(tokens: list[str], budget: int | None) -> tuple[GadgetHandle, Trace, int]:
    """Strategy spec: family name + params; returns (handle, trace, consumed)."""
    if not tokens:
        _fail(EXIT_USAGE, error="missing-strategy")
    name = tokens[0]

    def one_int(emitter, build):
        if len(tokens) < 2 or not _is_int(tokens[1]):
            _fail(EXIT_USAGE, error="bad-strategy-params", strategy=name)
        k = int(tokens[1])
        try:
            return build(k), emitter(k), 2
        except ValueError as e:
            _fail(EXIT_USAGE, error="bad-strategy-params", strategy=name, detail=str(e))

    if name == "path":
        return one_int(strategies.strat_path_reversible, families.path)
    if name == "pyramid":
        return one_int(strategies.strat_pyramid_reversible, families.pyramid)
    if name == "pyramid-std":
        return one_int(strategies.strat_pyramid_standard, families.pyramid)
    if name == "tree":
        return one_int(strategies.strat_tree_reversible, families.binary_tree)
    if name == "xmas":
        return one_int(strategies.strat_christmas, families.christmas_tree)
    if name == "mold":
        inner_handle, inner_trace, used = _parse_strategy_spec(tokens[1:], budget)
        if inner_trace.flavor != REVERSIBLE:
            _fail(EXIT_USAGE, error="bad-strategy-params", strategy=name,
                  detail="mold needs a reversible inner strategy")
        return (families.mold(inner_handle),
                strategies.strat_mold(inner_handle, inner_trace), used + 1)
    if name in ("product-rev", "product-std"):
        h1, t1, u1 = _parse_strategy_spec(tokens[1:], budget)
        h2, t2, u2 = _parse_strategy_spec(tokens[1 + u1:], budget)
        if name == "product-rev":
            handle = products.product_reversible(h1, h2)
            trace = strategies.strat_product_reversible(h1, t1, h2, t2)
        else:
            handle = products.product_standard(h1, h2)
            try:
                trace = strategies.strat_product_standard(h1, t1, h2, t2)
            except ValueError as e:
                _fail(EXIT_USAGE, error="bad-strategy-params", strategy=name,
                      detail=str(e))
                raise AssertionError
        return handle, trace, u1 + u2 + 1
    if name == "qbf":
        if len(tokens) < 2:
            _fail(EXIT_USAGE, error="missing-formula", strategy="qbf")
        phi = _load_formula(tokens[1])
        handle = qbf_reduction(phi).handle
        trace = strategies.strat_qbf(phi, move_budget=budget)
        return handle, trace, 2
    _fail(EXIT_USAGE, error="unknown-strategy", strategy=name,
          known=["path", "pyramid", "pyramid-std", "tree", "xmas", "mold",
                 "product-rev", "product-std", "qbf"])
    raise AssertionError


def _cmd_strategy(args) -> int:
    try:
        handle, trace, used = _parse_strategy_spec(args.spec, args.budget)
    except strategies.StrategyBudgetError as e:
        _fail(EXIT_CAP, error="move-budget-exceeded", detail=str(e))
        raise AssertionError
    if used != len(args.spec):
        _fail(EXIT_USAGE, error="trailing-arguments", extra=args.spec[used:])
    stats = validate_trace(handle.graph, trace)
    header = f"# space {stats.space} time {stats.time}\n"
    _write_out(header + format_trace(trace), args.out)
    return EXIT_OK


def _cmd_reduce(args) -> int:
    phi = _load_formula(args.formula)
    result = qbf_reduction(phi)
    handle = result.handle
    amplify = args.amplify
    if amplify < 1:
        _fail(EXIT_USAGE, error="bad-amplify", detail="--amplify must be >= 1")
    base = handle
    for _ in range(amplify - 1):
        projected = 3 * handle.graph.node_count * base.graph.node_count
        if projected > AMPLIFY_NODE_CAP:
            _fail(EXIT_CAP, error="cap-exceeded",
                  detail=f"amplified graph would have ~{projected} nodes",
                  lower_bound=handle.graph.node_count)
        handle = products.product_reversible(handle, base)
    report = validate(handle.graph, require_single_sink=True, max_fanin=2)
    d = handle.graph
    _emit_json({
        "formula": {"n": phi.n, "m": phi.m},
        "gamma": json.loads(result.ledger.to_json()),
        "amplify": amplify,
        "nodes": d.node_count,
        "edges": sum(len(p) for p in d.preds),
        "max_fanin": max((len(p) for p in d.preds), default=0),
        "sink": d.sink,
        "structure_ok": report.ok,
        "violations": sorted(report.codes()),
    })
    if args.out is not None:
        Path(args.out).write_text(format_graph(d))
        if handle.anchors:
            Path(args.out + ".anchors").write_text(format_anchors(handle.anchors))
    return EXIT_OK


def _parse_pebbler(sel: str, d: Dag):
    """Returns a fresh-instance factory; bisection carries per-game state."""
    if sel == "optimal":
        pebbler = strategies.dt_pebbler_optimal(d)
        return lambda: pebbler
    if sel.startswith("bisection:"):
        path = sel.split(":", 1)[1]
        try:
            trace = parse_trace(_read_text(path))
        except TraceFormatError as e:
            _fail(EXIT_INVALID, error="bad-trace", path=path, detail=str(e))
        try:
            validate_trace(d, trace)
        except IllegalMoveError as e:
            _fail(EXIT_INVALID, error="illegal-move", index=e.index,
                  rule=e.rule, vertex=e.vertex, flavor=e.flavor)
        return lambda: strategies.dt_pebbler_bisection(trace)
    _fail(EXIT_USAGE, error="bad-pebbler", detail=sel,
          known=["optimal", "bisection:<trace-file>"])
    raise AssertionError


def _cmd_play(args) -> int:
    d, _ = _load_graph(args.graph)
    try:
        d.require_sink()
    except ValueError as e:
        _fail(EXIT_INVALID, error="bad-graph", detail=str(e))
    new_pebbler = _parse_pebbler(args.pebbler, d)
    sel = args.challenger
    if sel == "exhaustive":
        return _play_exhaustive(d, args, new_pebbler)
    if sel == "optimal":
        challenger = strategies.dt_challenger_optimal(d)
    elif sel.startswith("road:"):
        parts = sel.split(":")
        if len(parts) != 3 or not all(_is_int(p) for p in parts[1:]):
            _fail(EXIT_USAGE, error="bad-challenger", detail=sel)
        challenger = strategies.dt_challenger_road(int(parts[1]), int(parts[2]))
    else:
        _fail(EXIT_USAGE, error="bad-challenger", detail=sel,
              known=["optimal", "road:<w>:<l>", "exhaustive"])
        raise AssertionError
    transcript = dt_play(d, new_pebbler(), challenger, round_cap=args.round_cap)
    _emit_json({
        "rounds": transcript.rounds,
        "log": [[r.placed, r.challenged_after] for r in transcript.log],
    })
    return EXIT_OK


def _play_exhaustive(d: Dag, args, new_pebbler) -> int:
    """Worst transcript over every stay/jump decision string."""
    worst = {"rounds": 0, "log": []}
    games = [0]

    def run(decisions: list[bool]):
        idx = [0]
        short = []

        def challenger(dd, gs, v):
            if idx[0] >= len(decisions):
                short.append(True)
                return gs.challenged
            take = decisions[idx[0]]
            idx[0] += 1
            return v if take else gs.challenged

        t = dt_play(d, new_pebbler(), challenger, round_cap=args.round_cap)
        return None if short else t

    def explore(prefix: list[bool]):
        t = run(prefix)
        if t is None:
            explore(prefix + [False])
            explore(prefix + [True])
            return
        games[0] += 1
        if t.rounds > worst["rounds"]:
            worst["rounds"] = t.rounds
            worst["log"] = [[r.placed, r.challenged_after] for r in t.log]

    explore([])
    _emit_json({"rounds": worst["rounds"], "games": games[0],
                "log": worst["log"]})
    return EXIT_OK


def _cmd_export(args) -> int:
    d, anchors = _load_graph(args.graph)
    if not args.dot:
        _fail(EXIT_USAGE, error="bad-export", detail="only --dot is supported")
    sys.stdout.write(to_dot(d, anchors))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pebble", description="pebbling toolkit command line")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph family")
    p.add_argument("spec", nargs="+",
                   help="family name and parameters, e.g. 'pyramid 3'")
    p.add_argument("--out", help="write the graph here plus an .anchors sidecar")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("solve", help="price a graph")
    p.add_argument("graph", nargs="?", default="-")
    p.add_argument("--flavor", required=True,
                   choices=[STANDARD, REVERSIBLE, "dt"])
    p.add_argument("--goal", default="persistent", choices=GOALS)
    p.add_argument("--target", help="comma-separated vertices for --goal config")
    p.add_argument("--region", help="file of vertex ids that count toward space")
    p.add_argument("--cap", type=int, help="price/state budget; exceeding exits 4")
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for compatibility; the solver is serial")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("validate", help="check a trace against a graph")
    p.add_argument("graph")
    p.add_argument("trace")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("strategy", help="emit a certified trace")
    p.add_argument("spec", nargs="+",
                   help="strategy name and parameters, e.g. 'tree 3'")
    p.add_argument("--out")
    p.add_argument("--budget", type=int,
                   help="move cap for the qbf strategy; exceeding exits 4")
    p.set_defaults(fn=_cmd_strategy)

    p = sub.add_parser("reduce", help="compile a QDIMACS formula to a graph")
    p.add_argument("formula")
    p.add_argument("--amplify", type=int, default=1,
                   help="product-amplify the graph this many times in total")
    p.add_argument("--out", help="write the graph here plus an .anchors sidecar")
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("play", help="referee one Pebbler/Challenger game")
    p.add_argument("graph")
    p.add_argument("--pebbler", required=True,
                   help="optimal | bisection:<trace-file>")
    p.add_argument("--challenger", required=True,
                   help="optimal | road:<w>:<l> | exhaustive")
    p.add_argument("--round-cap", type=int, default=10_000)
    p.set_defaults(fn=_cmd_play)

    p = sub.add_parser("export", help="export a graph")
    p.add_argument("graph", nargs="?", default="-")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(fn=_cmd_export)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        sys.stderr.write(json.dumps({"code": e.code, **e.payload}) + "\n")
        return e.code


if __name__ == "__main__":
    sys.exit(main())
