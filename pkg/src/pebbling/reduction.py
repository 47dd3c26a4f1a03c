"""Gadgets that compile a quantified 3-CNF formula into a pebbling instance.

The compiled graph's optimal reversible persistent price equals the
formula's ledger value γ when the formula is true and γ + 1 when it is
false, so deciding the price decides the formula.  The pieces, bottom to
top:

- literal / variable gadgets: a price-calibrated stack (christmas tree)
  whose sink ``lock`` feeds a fresh ``node``; pebbling the node costs one
  more than pebbling the lock.  A variable gadget is two disjoint literal
  gadgets, one per polarity.
- clause gadget: three toll roads (turnpikes) from the literal nodes into
  a small diamond; crossing the road whose entrance is already pebbled is
  cheaper, which is how a satisfied literal lowers the price.
- conjunction gadget: joins two priced subgraphs with three turnpikes so
  the result prices like "both subgadgets are cheap".
- cnf gadget: a conjunction chain folding every clause onto a seed stack.
- quantifier gadgets: wrap the matrix innermost-out; an existential layer
  adds 3 to the price, a universal layer 5.

Anchor naming: standalone gadgets use bare names ("l", "x", "a", "d1",
"q"); the full reduction suffixes them ("x3" for QDIMACS variable 3,
"a2" for clause 2, "d1_2" / "e_2" for conjunction stage 2, "q1" for the
innermost quantifier stage).  A "~" prefix marks the negative polarity
("~x3") and a trailing apostrophe the lock below a node ("x3'").
Turnpike interiors are anonymous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .dag import GraphBuilder, validate
from .families import GadgetHandle, christmas_tree, turnpike
from .qbf import EXISTS, FORALL, GammaLedger, Qbf
from .qbf import gamma as gamma_ledger

__all__ = [
    "LitRef",
    "ReductionResult",
    "literal_gadget",
    "variable_gadget",
    "clause_gadget",
    "conjunction_gadget",
    "cnf_gadget",
    "existential_gadget",
    "universal_gadget",
    "qbf_reduction",
    "canonical_nodes",
]

# A literal reference: (gadget handle, anchor name of the literal node).
LitRef = tuple[GadgetHandle, str]


# ---------------------------------------------------------------------------
# builder-level workers
#
# Each worker wires one gadget into an existing GraphBuilder and returns a
# descriptor dict with the new vertex ids.  Public constructors embed their
# sub-handles into a fresh builder and delegate here; qbf_reduction calls
# the workers directly so clause turnpikes can share variable gadgets.


def _pike(b: GraphBuilder, toll: int, entrance: int, exit_node: int) -> dict[str, Any]:
    """Wire a turnpike of the given toll between two existing vertices.

    The exit must have no other incoming edges (it gains the turnpike's
    two, keeping fan-in at 2).  Toll 0 degenerates to a plain edge.
    """
    if toll < 0:
        raise ValueError(f"turnpike toll must be >= 0, got {toll}")
    if toll == 0:
        b.edge(entrance, exit_node)
        return {"toll": 0, "handle": None, "trans": None,
                "entrance": entrance, "exit": exit_node}
    t = turnpike(toll)
    trans = b.embed(t.graph, {t.anchors["a"]: entrance, t.anchors["b"]: exit_node})
    return {"toll": toll, "handle": t, "trans": trans,
            "entrance": entrance, "exit": exit_node}


def _literal(b: GraphBuilder, r: int, node_name: str, lock_name: str) -> dict[str, Any]:
    """One literal gadget: price-r stack, its sink (the lock) feeding a new node."""
    if r < 1:
        raise ValueError(f"literal price must be >= 1, got {r}")
    tree = christmas_tree(r)
    trans = b.embed(tree.graph)
    lock = trans[tree.anchors["sink"]]
    b.label(lock, lock_name)
    node = b.add(node_name)
    b.edge(lock, node)
    return {"r": r, "tree": tree, "trans": trans, "node": node, "lock": lock}


def _variable(b: GraphBuilder, r: int, tag: str) -> dict[str, Any]:
    """Two disjoint literal gadgets, one per polarity of a variable."""
    pos = _literal(b, r, f"x{tag}", f"x{tag}'")
    neg = _literal(b, r, f"~x{tag}", f"~x{tag}'")
    return {"price": r, "pos": pos, "neg": neg}


def _clause_core(b: GraphBuilder, tag: str, toll: int,
                 entrances: Sequence[int]) -> dict[str, Any]:
    """Clause diamond plus three equal-toll turnpikes from the literal nodes."""
    na = b.add(f"a{tag}")
    nb = b.add(f"b{tag}")
    nc = b.add(f"c{tag}")
    nu = b.add(f"u{tag}")
    nv = b.add(f"v{tag}")
    np_ = b.add(f"p{tag}")
    b.edge(na, nu)
    b.edge(nb, nu)
    b.edge(nb, nv)
    b.edge(nc, nv)
    b.edge(nu, np_)
    b.edge(nv, np_)
    pikes = [_pike(b, toll, entrances[0], na),
             _pike(b, toll, entrances[1], nb),
             _pike(b, toll, entrances[2], nc)]
    return {"toll": toll,
            "nodes": {"a": na, "b": nb, "c": nc, "u": nu, "v": nv, "p": np_},
            "pikes": pikes}


def _conjunction_core(b: GraphBuilder, tag: str, weight: int,
                      sink1: int, sink2: int) -> dict[str, Any]:
    """Join two priced sinks: tolls weight / weight-1 into a 2-pred join,
    then a toll weight-2 turnpike into the new sink's sole predecessor."""
    if weight < 2:
        raise ValueError(f"conjunction weight must be >= 2, got {weight}")
    sep = "_" if tag else ""
    d1 = b.add(f"d1{sep}{tag}")
    d2 = b.add(f"d2{sep}{tag}")
    d3 = b.add(f"d3{sep}{tag}")
    d4 = b.add(f"d4{sep}{tag}")
    e = b.add(f"e{sep}{tag}")
    pikes = [_pike(b, weight, sink1, d1),
             _pike(b, weight - 1, sink2, d2)]
    b.edge(d1, d3)
    b.edge(d2, d3)
    pikes.append(_pike(b, weight - 2, d3, d4))
    b.edge(d4, e)
    return {"weight": weight,
            "nodes": {"d1": d1, "d2": d2, "d3": d3, "d4": d4, "e": e},
            "pikes": pikes}


def _exists_core(b: GraphBuilder, tag: str, gamma_i: int, prev_sink: int,
                 x_node: int, nx_node: int) -> dict[str, Any]:
    """Existential wrapper: q's preds are f (tolled continuation of the
    previous sink) and g (joint successor of both polarity nodes)."""
    toll = gamma_i - 5
    if toll < 0:
        raise ValueError(
            f"existential wrapper needs price >= 5, got {gamma_i}")
    f = b.add(f"f{tag}")
    g = b.add(f"g{tag}")
    q = b.add(f"q{tag}")
    pike = _pike(b, toll, prev_sink, f)
    b.edge(x_node, g)
    b.edge(nx_node, g)
    b.edge(f, q)
    b.edge(g, q)
    return {"kind": EXISTS, "gamma": gamma_i, "tolls": (toll,),
            "nodes": {"f": f, "g": g, "q": q}, "pikes": [pike]}


def _forall_core(b: GraphBuilder, tag: str, gamma_i: int, prev_sink: int,
                 x_node: int, x_lock: int, nx_node: int, nx_lock: int) -> dict[str, Any]:
    """Universal wrapper: two mirrored half-gadgets, one per branch value,
    joined at q.  Each half prices one branch of the game tree."""
    toll_f = gamma_i - 6
    toll_g = gamma_i - 7
    if toll_g < 0:
        raise ValueError(
            f"universal wrapper needs price >= 7, got {gamma_i}")
    fp = b.add(f"f{tag}'")
    nfp = b.add(f"~f{tag}'")
    f = b.add(f"f{tag}")
    nf = b.add(f"~f{tag}")
    g = b.add(f"g{tag}")
    ng = b.add(f"~g{tag}")
    h = b.add(f"h{tag}")
    nh = b.add(f"~h{tag}")
    q = b.add(f"q{tag}")
    # True half: f' checks the canonical-true pair, g continues the suffix.
    b.edge(x_node, fp)
    b.edge(nx_lock, fp)
    # False half mirrors it on the canonical-false pair.
    b.edge(nx_node, nfp)
    b.edge(x_lock, nfp)
    pikes = [_pike(b, toll_f, fp, f),
             _pike(b, toll_f, nfp, nf),
             _pike(b, toll_g, prev_sink, g),
             _pike(b, toll_g, prev_sink, ng)]
    b.edge(f, h)
    b.edge(g, h)
    b.edge(nf, nh)
    b.edge(ng, nh)
    b.edge(h, q)
    b.edge(nh, q)
    return {"kind": FORALL, "gamma": gamma_i, "tolls": (toll_f, toll_f, toll_g, toll_g),
            "nodes": {"f'": fp, "~f'": nfp, "f": f, "~f": nf, "g": g,
                      "~g": ng, "h": h, "~h": nh, "q": q},
            "pikes": pikes}


def _check_single_sink_fanin(d, context: str) -> None:
    report = validate(d, require_single_sink=True, max_fanin=2)
    if not report.ok:
        raise AssertionError(f"{context}: {report.violations}")


# ---------------------------------------------------------------------------
# standalone gadget constructors


def literal_gadget(r: int) -> GadgetHandle:
    """Literal gadget of price parameter r.

    The sink ("l") costs r+1 to pebble persistently; its sole predecessor,
    the lock ("l'"), costs r.  A pebble resting on l is the canonical
    "this literal is satisfied" token; a pebble on l' is the opposite.
    """
    b = GraphBuilder()
    info = _literal(b, r, "l", "l'")
    g = b.freeze(sink=info["node"])
    _check_single_sink_fanin(g, "literal_gadget")
    anchors = {"l": info["node"], "l'": info["lock"], "sink": info["node"]}
    return GadgetHandle(g, anchors, {"r": r, "lit": info})


def variable_gadget(r: int) -> GadgetHandle:
    """Two disjoint literal gadgets for the two polarities of one variable.

    Anchors: x, x' (positive node and lock), ~x, ~x' (negative).  The
    handle has no single sink; the canonical true position pebbles
    {x, ~x'} and the canonical false position {x', ~x}, either one
    holdable with r+1 pebbles.
    """
    b = GraphBuilder()
    info = _variable(b, r, "")
    g = b.freeze()
    anchors = {
        "x": info["pos"]["node"], "x'": info["pos"]["lock"],
        "~x": info["neg"]["node"], "~x'": info["neg"]["lock"],
    }
    return GadgetHandle(g, anchors, {"r": r, "var": info})


def _embed_lit_refs(b: GraphBuilder, refs: Sequence[LitRef],
                    trans_by_handle: dict[int, list[int]]) -> list[dict[str, Any]]:
    """Embed each distinct referenced handle once; resolve refs to builder ids."""
    resolved = []
    for handle, anchor in refs:
        key = id(handle)
        if key not in trans_by_handle:
            trans_by_handle[key] = b.embed(handle.graph)
        if anchor not in handle.anchors:
            raise KeyError(f"handle has no anchor {anchor!r}")
        trans = trans_by_handle[key]
        resolved.append({"handle": handle, "anchor": anchor, "trans": trans,
                         "node": trans[handle.anchors[anchor]]})
    return resolved


def clause_gadget(beta: int, lit1: LitRef, lit2: LitRef, lit3: LitRef) -> GadgetHandle:
    """Clause gadget over three literal anchors with a common toll beta.

    Each literal reference is (handle, anchor name); the three handles
    must be distinct objects, one per variable (a clause may not mention
    a variable twice).  Referenced handles are embedded disjointly and
    each named literal node becomes a turnpike entrance; the turnpikes
    feed a diamond a,b,c -> u,v -> p with sink p.
    """
    if beta < 2:
        raise ValueError(f"clause toll must be >= 2, got {beta}")
    refs = (lit1, lit2, lit3)
    if len({id(h) for h, _ in refs}) != 3:
        raise ValueError("clause literals must come from three distinct gadgets")
    b = GraphBuilder()
    trans_by_handle: dict[int, list[int]] = {}
    lits = _embed_lit_refs(b, refs, trans_by_handle)
    core = _clause_core(b, "", beta, [li["node"] for li in lits])
    g = b.freeze(sink=core["nodes"]["p"])
    anchors = dict(core["nodes"])
    anchors["sink"] = core["nodes"]["p"]
    meta = {"beta": beta, "lits": lits, "core": core}
    return GadgetHandle(g, anchors, meta)


def conjunction_gadget(r: int, g1: GadgetHandle, g2: GadgetHandle) -> GadgetHandle:
    """Conjoin two single-sink gadgets with tolls r, r-1, r-2.

    Calibration: if g1's sink prices at r+1 (plus one when its condition
    fails) and g2's sink prices at r (plus one when its condition fails),
    the new sink e prices at r+3, plus one unless both conditions hold.
    """
    if r < 2:
        raise ValueError(f"conjunction parameter must be >= 2, got {r}")
    b = GraphBuilder()
    t1 = b.embed(g1.graph)
    t2 = b.embed(g2.graph)
    s1 = t1[g1.graph.require_sink()]
    s2 = t2[g2.graph.require_sink()]
    core = _conjunction_core(b, "", r, s1, s2)
    g = b.freeze(sink=core["nodes"]["e"])
    anchors = dict(core["nodes"])
    anchors["sink"] = core["nodes"]["e"]
    meta = {"r": r, "core": core,
            "g1": {"handle": g1, "trans": t1, "sink": s1},
            "g2": {"handle": g2, "trans": t2, "sink": s2}}
    return GadgetHandle(g, anchors, meta)


def cnf_gadget(clause_lits: Sequence[tuple[LitRef, LitRef, LitRef]],
               tolls: Sequence[int] | None = None,
               seed: GadgetHandle | None = None) -> GadgetHandle:
    """Conjunction chain folding each clause onto a seed stack.

    clause_lits: per clause, three (handle, anchor) literal references.
    Distinct handle objects are embedded once and shared across clauses,
    so passing the same variable gadget to several clauses wires them to
    one copy.  Clause j gets toll tolls[j-1] (default 2j) and is folded
    on with a conjunction of weight toll+4.  The seed defaults to a
    stack priced tolls[0]+5 (price 7 at default tolls); pass smaller
    tolls plus a matching seed for brute-force-sized instances.
    """
    m = len(clause_lits)
    if tolls is None:
        tolls = [2 * j for j in range(1, m + 1)]
    tolls = list(tolls)
    if len(tolls) != m:
        raise ValueError(f"need {m} tolls, got {len(tolls)}")
    b = GraphBuilder()
    seed = seed if seed is not None else christmas_tree(tolls[0] + 5 if m else 7)
    seed_trans = b.embed(seed.graph)
    chain_sink = seed_trans[seed.graph.require_sink()]
    b.label(chain_sink, "e_0")

    trans_by_handle: dict[int, list[int]] = {}
    clauses = []
    conjunctions = []
    for k in range(1, m + 1):
        refs = clause_lits[k - 1]
        if len({id(h) for h, _ in refs}) != 3:
            raise ValueError(
                f"clause {k}: literals must come from three distinct gadgets")
        lits = _embed_lit_refs(b, refs, trans_by_handle)
        core = _clause_core(b, str(k), tolls[k - 1], [li["node"] for li in lits])
        conj = _conjunction_core(b, str(k), tolls[k - 1] + 4,
                                 chain_sink, core["nodes"]["p"])
        clauses.append({"j": k, "toll": tolls[k - 1], "lits": lits, **core})
        conjunctions.append({"k": k, **conj})
        chain_sink = conj["nodes"]["e"]

    g = b.freeze(sink=chain_sink)
    _check_single_sink_fanin(g, "cnf_gadget")
    anchors = {"sink": chain_sink}
    for cl in clauses:
        for name, v in cl["nodes"].items():
            anchors[f"{name}{cl['j']}"] = v
    for cj in conjunctions:
        for name, v in cj["nodes"].items():
            anchors[f"{name}_{cj['k']}"] = v
    meta = {"m": m, "tolls": tolls, "seed": {"handle": seed, "trans": seed_trans},
            "clauses": clauses, "conjunctions": conjunctions,
            "embedded": trans_by_handle}
    return GadgetHandle(g, anchors, meta)


def _var_anchor_ids(var: GadgetHandle) -> tuple[int, int, int, int]:
    try:
        return (var.anchors["x"], var.anchors["x'"],
                var.anchors["~x"], var.anchors["~x'"])
    except KeyError:
        raise KeyError("variable handle must expose anchors x, x', ~x, ~x'")


def existential_gadget(gamma_i: int, prev: GadgetHandle, var: GadgetHandle) -> GadgetHandle:
    """Existential wrapper around a priced suffix gadget.

    prev: single-sink gadget pricing the quantified suffix (plus one when
    false); var: variable_gadget for the bound variable.  The new sink q
    prices at gamma_i, plus one when the wrapped formula is false.
    """
    b = GraphBuilder()
    tp = b.embed(prev.graph)
    tv = b.embed(var.graph)
    x, _, nx, _ = _var_anchor_ids(var)
    core = _exists_core(b, "", gamma_i, tp[prev.graph.require_sink()],
                        tv[x], tv[nx])
    g = b.freeze(sink=core["nodes"]["q"])
    _check_single_sink_fanin(g, "existential_gadget")
    anchors = dict(core["nodes"])
    anchors["sink"] = core["nodes"]["q"]
    meta = {"core": core,
            "prev": {"handle": prev, "trans": tp},
            "var": {"handle": var, "trans": tv}}
    return GadgetHandle(g, anchors, meta)


def universal_gadget(gamma_i: int, prev: GadgetHandle, var: GadgetHandle) -> GadgetHandle:
    """Universal wrapper around a priced suffix gadget (see existential_gadget)."""
    b = GraphBuilder()
    tp = b.embed(prev.graph)
    tv = b.embed(var.graph)
    x, xl, nx, nxl = _var_anchor_ids(var)
    core = _forall_core(b, "", gamma_i, tp[prev.graph.require_sink()],
                        tv[x], tv[xl], tv[nx], tv[nxl])
    g = b.freeze(sink=core["nodes"]["q"])
    _check_single_sink_fanin(g, "universal_gadget")
    anchors = dict(core["nodes"])
    anchors["sink"] = core["nodes"]["q"]
    meta = {"core": core,
            "prev": {"handle": prev, "trans": tp},
            "var": {"handle": var, "trans": tv}}
    return GadgetHandle(g, anchors, meta)


# ---------------------------------------------------------------------------
# full reduction


@dataclass(frozen=True)
class ReductionResult:
    """Compiled pebbling instance for a formula.

    handle.meta carries the structural inventory: per-variable literal
    info, per-clause and per-conjunction cores with their turnpike
    descriptors, and per-quantifier wrapper cores, everything in builder
    vertex ids.
    """

    handle: GadgetHandle
    gamma: int
    ledger: GammaLedger

    @property
    def graph(self):
        return self.handle.graph


def qbf_reduction(q: Qbf) -> ReductionResult:
    """Compile a closed prenex 3-CNF formula into a single-sink DAG.

    The reversible persistent pebbling price of the result is the ledger
    value when the formula is true and one more when it is false.  All
    clause turnpikes share one variable gadget per variable; quantifier
    wrappers are applied innermost-out, each consuming the previous sink.
    """
    ledger = gamma_ledger(q)
    b = GraphBuilder()

    variables: dict[int, dict[str, Any]] = {}
    for i, var in enumerate(ledger.inner_to_variable, start=1):
        info = _variable(b, ledger.literal_prices[i - 1], str(var))
        info["inner"] = i
        info["variable"] = var
        variables[var] = info

    seed = christmas_tree(ledger.clause_tolls[0] + 5 if q.m else 7)
    seed_trans = b.embed(seed.graph)
    chain_sink = seed_trans[seed.graph.require_sink()]
    b.label(chain_sink, "e_0")

    clauses = []
    conjunctions = []
    for j, clause in enumerate(q.clauses, start=1):
        entrances = []
        lits = []
        for lit in clause:
            info = variables[abs(lit)]
            side = info["pos"] if lit > 0 else info["neg"]
            entrances.append(side["node"])
            lits.append({"variable": abs(lit), "negated": lit < 0,
                         "node": side["node"]})
        toll = ledger.clause_tolls[j - 1]
        core = _clause_core(b, str(j), toll, entrances)
        conj = _conjunction_core(b, str(j), toll + 4, chain_sink, core["nodes"]["p"])
        clauses.append({"j": j, "toll": toll, "lits": lits, **core})
        conjunctions.append({"k": j, **conj})
        chain_sink = conj["nodes"]["e"]
    b.label(chain_sink, "q0")

    quantifiers = []
    prev_sink = chain_sink
    for i, quant in enumerate(ledger.quantifiers, start=1):
        var = ledger.inner_to_variable[i - 1]
        info = variables[var]
        gamma_i = ledger.gammas[i]
        if quant == EXISTS:
            core = _exists_core(b, str(i), gamma_i, prev_sink,
                                info["pos"]["node"], info["neg"]["node"])
        else:
            core = _forall_core(b, str(i), gamma_i, prev_sink,
                                info["pos"]["node"], info["pos"]["lock"],
                                info["neg"]["node"], info["neg"]["lock"])
        core["i"] = i
        core["variable"] = var
        quantifiers.append(core)
        prev_sink = core["nodes"]["q"]

    g = b.freeze(sink=prev_sink)
    _check_single_sink_fanin(g, "qbf_reduction")

    anchors: dict[str, int] = {"sink": prev_sink, "q0": chain_sink}
    for var, info in variables.items():
        anchors[f"x{var}"] = info["pos"]["node"]
        anchors[f"x{var}'"] = info["pos"]["lock"]
        anchors[f"~x{var}"] = info["neg"]["node"]
        anchors[f"~x{var}'"] = info["neg"]["lock"]
    for cl in clauses:
        for name, v in cl["nodes"].items():
            anchors[f"{name}{cl['j']}"] = v
    for cj in conjunctions:
        for name, v in cj["nodes"].items():
            anchors[f"{name}_{cj['k']}"] = v
    for qc in quantifiers:
        for name, v in qc["nodes"].items():
            # "f" -> "f2", "~f'" -> "~f2'": the stage index goes before any lock mark.
            if name.endswith("'"):
                anchors[f"{name[:-1]}{qc['i']}'"] = v
            else:
                anchors[f"{name}{qc['i']}"] = v

    meta = {
        "formula": q,
        "ledger": ledger,
        "variables": variables,
        "seed": {"handle": seed, "trans": seed_trans},
        "clauses": clauses,
        "conjunctions": conjunctions,
        "quantifiers": quantifiers,
    }
    handle = GadgetHandle(g, anchors, meta)
    return ReductionResult(handle=handle, gamma=ledger.value, ledger=ledger)


def canonical_nodes(result: ReductionResult, assignment: dict[int, bool]) -> frozenset[int]:
    """Vertices of the canonical pebble position encoding an assignment.

    True pebbles the positive node and the negative lock; false the
    positive lock and the negative node.
    """
    out: set[int] = set()
    for var, value in assignment.items():
        info = result.handle.meta["variables"][var]
        if value:
            out.add(info["pos"]["node"])
            out.add(info["neg"]["lock"])
        else:
            out.add(info["pos"]["lock"])
            out.add(info["neg"]["node"])
    return frozenset(out)
