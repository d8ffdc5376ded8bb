"""Saturation, model-graph construction, and countermodel extraction.

A non-derivable sequent is first saturated: static rules are applied
exhaustively and the non-derivable leaves collected.  Each saturated
state becomes a world.  Unwitnessed arrows are then discharged
recursively: an implication on the right whose antecedent is not already
on the left needs a successor world, an exclusion on the left whose
subtrahend is not already on the right needs a predecessor.

The recursion on an arrow's left premise returns a graph in components,
each tagged with an integer sort, together with variable values tagging
the component they came from.  A component whose returned side is
contained in the current state's side can be grafted directly: the edge
to it respects persistence by construction.  When no component fits, the
state's own expansion was too coarse; all work for the state is
abandoned, the returned member sets are added to the state wholesale
(as a wrapper, immediately unpacked), and construction recurses on the
open premises.  This is the recompute step; each round strictly grows
the state's sides inside the finite subformula universe, so it ends.

The result is verified against the model-graph properties and the
extracted Kripke model is checked to falsify the input before either is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import Atom, Formula
from .prover import (
    Budget,
    ContractViolation,
    DEFAULT_NODE_BUDGET,
    InternalError,
    VerificationError,
    prove,
)
from .sequent import (
    OPEN,
    BigAnd,
    BigOr,
    RuleId,
    Sequent,
    VarSets,
    axiom_rule,
    is_saturated,
    next_static,
    premises,
)
from .semantics import KripkeModel, check_persistence, falsifies


class GraphWorld:
    """A world of the model graph: its component sort and saturated sequent."""

    __slots__ = ("sort", "sequent")

    def __init__(self, sort: int, sequent: Sequent):
        self.sort = sort
        self.sequent = sequent

    def __repr__(self):
        return f"GraphWorld(sort={self.sort}, {self.sequent!r})"


@dataclass
class ModelGraph:
    """Disjoint components of saturated worlds; `roots` maps sort to root id."""

    worlds: dict
    edges: set
    roots: dict
    target: Sequent

    def sorts(self):
        return sorted(self.roots)

    def component(self, sort: int):
        """World ids and internal edges of one component, sorted."""
        ids = sorted(i for i, w in self.worlds.items() if w.sort == sort)
        members = set(ids)
        edges = sorted((u, v) for u, v in self.edges if u in members and v in members)
        return ids, edges


def _coerce(budget) -> Budget:
    if isinstance(budget, Budget):
        return budget
    return Budget(DEFAULT_NODE_BUDGET if budget is None else budget)


class BuildCache:
    """Shared memo for graph construction across many unrelated inputs.

    The construction is deterministic in the input sequent, so both the
    prove status of a candidate state and the finished component layout
    of a sub-build can be reused when the same sequent shows up again,
    which happens constantly when a large corpus is processed in one
    sweep.  Component layouts are stored sort-free (`_template`) and
    re-stamped with fresh identifiers on every hit.  `nodes` is handed to
    uninstrumented prove calls as their result memo, so status probes
    share subtrees across inputs as well.  `nodes` grows an order of
    magnitude faster than the other two maps and flushes against its own
    budget, so dropping search subtrees never evicts the far more
    expensive finished layouts; each map still cannot grow without
    bound, and hot entries repopulate quickly.
    """

    __slots__ = ("status", "built", "nodes", "cap", "node_cap", "flushes")

    def __init__(self, cap: int = 2_000_000, node_cap: int = 2_000_000):
        self.status = {}
        self.built = {}
        self.nodes = {}
        self.cap = cap
        self.node_cap = node_cap
        self.flushes = 0

    def trim(self):
        if len(self.nodes) > self.node_cap:
            self.nodes.clear()
            self.flushes += 1
        if len(self.status) + len(self.built) > self.cap:
            self.status.clear()
            self.built.clear()
            self.flushes += 1


def _template(worlds, edges, roots, svar, pvar):
    """Sort-free form of a build result.

    One entry per component, in ascending sort order: the sorts are
    handed out by one monotone counter, so ascending order is creation
    order, and stamping fresh sorts in the same order preserves every
    least-sort comparison the callers make.  Worlds are kept as local
    indices with the component's sequents; sequents are immutable, so
    the template cannot be corrupted by later grafts mutating the
    original GraphWorld objects.
    """
    smap = dict(svar)
    pmap = dict(pvar)
    comps = []
    for sort in sorted(roots):
        ids = sorted(i for i, w in worlds.items() if w.sort == sort)
        index = {i: k for k, i in enumerate(ids)}
        seqs = tuple(worlds[i].sequent for i in ids)
        comp_edges = tuple(
            (index[u], index[v]) for u, v in sorted(edges) if u in index and v in index
        )
        comps.append((seqs, comp_edges, index[roots[sort]], smap[sort], pmap[sort]))
    return tuple(comps)


def saturate(seq: Sequent, budget=None, status_cache=None, node_memo=None):
    """Close a non-derivable sequent under the static rules.

    Returns the canonically sorted list of saturated states: the
    non-derivable leaves of the static closure tree.  Raises
    ContractViolation when the input turns out to be derivable (no leaf
    survives the filter).  `status_cache` memoizes leaf statuses across
    the repeated saturations of one graph construction; `node_memo`, when
    given, is handed to the status proves as a shared result memo.
    """
    b = _coerce(budget)
    seen = {seq}
    queue = [seq]
    leaves = []
    while queue:
        s = queue.pop()
        b.spend()
        if axiom_rule(s) is not None:
            continue
        st = next_static(s)
        if st is None:
            leaves.append(s)
            continue
        for p in premises(s, st[0], st[1]):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    out = []
    for s in leaves:
        status = status_cache.get(s) if status_cache is not None else None
        if status is None:
            status = prove(s, budget=b, memo=node_memo).status
            if status_cache is not None:
                status_cache[s] = status
        if status == OPEN:
            if not is_saturated(s):
                raise InternalError(f"open static leaf not saturated: {s!r}")
            out.append(s)
    if not out:
        raise ContractViolation("saturate() requires a non-derivable sequent")
    out.sort(key=Sequent.sort_key)
    return out


class _Builder:
    def __init__(self, budget: Budget, cache: Optional[BuildCache] = None):
        self.budget = budget
        self.next_world = 0
        self.next_sort = 0
        self.cache = cache
        # sequent -> prove status, shared across the whole construction
        # (and across constructions when a BuildCache is supplied)
        self.status_cache = cache.status if cache is not None else {}
        self.node_memo = cache.nodes if cache is not None else {}

    def _open(self, seq: Sequent) -> bool:
        status = self.status_cache.get(seq)
        if status is None:
            status = prove(seq, budget=self.budget, memo=self.node_memo).status
            self.status_cache[seq] = status
        return status == OPEN

    def fresh_world(self) -> int:
        i = self.next_world
        self.next_world += 1
        return i

    def fresh_sort(self) -> int:
        i = self.next_sort
        self.next_sort += 1
        return i

    def build(self, seq: Sequent):
        """Graph pieces for a sequent: (worlds, edges, roots, lhs vars, rhs vars).

        Variable entries are (sort, member frozenset) pairs so callers can
        match a member back to its component.
        """
        cache = self.cache
        if cache is not None:
            tpl = cache.built.get(seq)
            if tpl is not None:
                return self._stamp(tpl)
        worlds = {}
        edges = set()
        roots = {}
        svar = set()
        pvar = set()
        for alpha in saturate(seq, self.budget, self.status_cache, self.node_memo):
            w, e, r, s, p = self.build_state(alpha)
            worlds.update(w)
            edges |= e
            roots.update(r)
            svar |= s
            pvar |= p
        if cache is not None:
            cache.built[seq] = _template(worlds, edges, roots, svar, pvar)
            cache.trim()
        return worlds, edges, roots, svar, pvar

    def _stamp(self, comps):
        # materialize a cached template under fresh world ids and sorts
        worlds = {}
        edges = set()
        roots = {}
        svar = set()
        pvar = set()
        for seqs, comp_edges, root_idx, sm, pm in comps:
            sort = self.fresh_sort()
            ids = [self.fresh_world() for _ in seqs]
            for i, s in zip(ids, seqs):
                worlds[i] = GraphWorld(sort, s)
            edges.update((ids[u], ids[v]) for u, v in comp_edges)
            roots[sort] = ids[root_idx]
            svar.add((sort, sm))
            pvar.add((sort, pm))
        return worlds, edges, roots, svar, pvar

    def build_state(self, alpha: Sequent):
        sort = self.fresh_sort()
        root = self.fresh_world()
        worlds = {root: GraphWorld(sort, alpha)}
        edges = set()
        lhs = alpha.plain_lhs
        rhs = alpha.plain_rhs
        imps = sorted((f for f in rhs if f.rank == 5 and f.left not in lhs), key=Formula.sort_key)
        excls = sorted((f for f in lhs if f.rank == 6 and f.right not in rhs), key=Formula.sort_key)
        for f in imps:
            self.budget.spend()
            left = Sequent(alpha.lhs | {f.left}, frozenset((f.right,)))
            cw, ce, cr, cs, cp = self.build(left)
            fits = sorted((s, m) for s, m in cp if m <= rhs)
            if not fits:
                members = frozenset(m for _, m in cp)
                return self.recompute(
                    Sequent(alpha.lhs, alpha.rhs | {BigAnd(members)}), RuleId.BIG_AND_R
                )
            j = fits[0][0]
            self.graft(worlds, edges, sort, cw, ce, j)
            edges.add((root, cr[j]))
        for f in excls:
            self.budget.spend()
            left = Sequent(frozenset((f.left,)), alpha.rhs | {f.right})
            cw, ce, cr, cs, cp = self.build(left)
            fits = sorted((s, m) for s, m in cs if m <= lhs)
            if not fits:
                members = frozenset(m for _, m in cs)
                return self.recompute(
                    Sequent(alpha.lhs | {BigOr(members)}, alpha.rhs), RuleId.BIG_OR_L
                )
            j = fits[0][0]
            self.graft(worlds, edges, sort, cw, ce, j)
            edges.add((cr[j], root))
        return (
            worlds,
            edges,
            {sort: root},
            {(sort, lhs)},
            {(sort, rhs)},
        )

    def graft(self, worlds, edges, sort, child_worlds, child_edges, j):
        # adopt component j under this state's sort; other components and
        # the child's variables are dropped
        ids = {i for i, w in child_worlds.items() if w.sort == j}
        for i in ids:
            w = child_worlds[i]
            w.sort = sort
            worlds[i] = w
        edges |= {(u, v) for u, v in child_edges if u in ids and v in ids}

    def recompute(self, widened: Sequent, rule: RuleId):
        wrapper = widened.rhs_wrapper() if rule is RuleId.BIG_AND_R else widened.lhs_wrapper()
        worlds = {}
        edges = set()
        roots = {}
        svar = set()
        pvar = set()
        opened = [p for p in premises(widened, rule, wrapper) if self._open(p)]
        if not opened:
            raise ContractViolation("every widened premise proved derivable during recompute")
        for p in opened:
            w, e, r, s, pv = self.build(p)
            worlds.update(w)
            edges |= e
            roots.update(r)
            svar |= s
            pvar |= pv
        return worlds, edges, roots, svar, pvar


def mgc(seq: Sequent, budget=None, cache: Optional[BuildCache] = None):
    """Model graph construction for a non-derivable sequent.

    Returns (graph, vars): the graph's components each falsify the input
    at their root; the variable values are the member sets of the
    surviving states with sort tags stripped.  Pass one `cache` across
    many calls to reuse sub-constructions between them.
    """
    b = _coerce(budget)
    builder = _Builder(b, cache)
    worlds, edges, roots, svar, pvar = builder.build(seq)
    graph = ModelGraph(worlds, edges, roots, seq)
    return graph, VarSets(
        frozenset(m for _, m in svar), frozenset(m for _, m in pvar)
    )


def _closure(ids, edges):
    adj = {i: set() for i in ids}
    for u, v in edges:
        adj[u].add(v)
    succ = {}
    for w in ids:
        seen = {w}
        stack = [w]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        succ[w] = seen
    return succ


def verify_model_graph(graph: ModelGraph, sort: int):
    """Check the seven model-graph properties of one component.

    Works over the reflexive-transitive closure of the component's edges.
    Returns (True, summary) or (False, first violation with a witness).
    """
    ids, edges = graph.component(sort)
    if not ids:
        return False, f"no worlds of sort {sort}"
    if sort not in graph.roots or graph.roots[sort] not in ids:
        return False, f"component {sort} has no root world"
    for u, v in graph.edges:
        if (u in ids) != (v in ids):
            return False, f"edge ({u}, {v}) crosses the component boundary"
    root = graph.roots[sort]
    seqs = {i: graph.worlds[i].sequent for i in ids}
    for i in ids:
        if not is_saturated(seqs[i]):
            return False, f"world {i} is not saturated: {seqs[i]!r}"
    succ = _closure(ids, edges)
    pred = {i: {u for u in ids if i in succ[u]} for i in ids}

    # 1: the target sequent is contained in the root world
    rs = seqs[root]
    if not (graph.target.plain_lhs <= rs.plain_lhs and graph.target.plain_rhs <= rs.plain_rhs):
        return False, f"property 1: root {root} does not contain the target sequent"
    for w in ids:
        lhs_w = seqs[w].plain_lhs
        rhs_w = seqs[w].plain_rhs
        # 2: implications on the right need a witnessing successor
        for f in rhs_w:
            if f.rank == 5:
                if not any(
                    f.left in seqs[v].plain_lhs and f.right in seqs[v].plain_rhs
                    for v in succ[w]
                ):
                    return False, (
                        f"property 2: {f!r} in rhs of world {w} has no successor witness"
                    )
        # 3: exclusions on the left need a witnessing predecessor
        for f in lhs_w:
            if f.rank == 6:
                if not any(
                    f.left in seqs[u].plain_lhs and f.right in seqs[u].plain_rhs
                    for u in pred[w]
                ):
                    return False, (
                        f"property 3: {f!r} in lhs of world {w} has no predecessor witness"
                    )
        # 4: implications on the left propagate to every successor
        for f in lhs_w:
            if f.rank == 5:
                for v in succ[w]:
                    if f.left not in seqs[v].plain_rhs and f.right not in seqs[v].plain_lhs:
                        return False, (
                            f"property 4: {f!r} in lhs of {w} unresolved at successor {v}"
                        )
        # 5: exclusions on the right propagate to every predecessor
        for f in rhs_w:
            if f.rank == 6:
                for u in pred[w]:
                    if f.left not in seqs[u].plain_rhs and f.right not in seqs[u].plain_lhs:
                        return False, (
                            f"property 5: {f!r} in rhs of {w} unresolved at predecessor {u}"
                        )
        # 6 and 7: left sides persist forward, right sides persist backward
        for v in succ[w]:
            if not lhs_w <= seqs[v].plain_lhs:
                return False, f"property 6: lhs of {w} not contained in lhs of successor {v}"
            if not seqs[v].plain_rhs <= rhs_w:
                return False, f"property 7: rhs of successor {v} not contained in rhs of {w}"
    return True, f"ok: {len(ids)} worlds, {len(edges)} edges, root {root}"


def is_ditree(graph: ModelGraph, sort: int):
    """Is the component's edge skeleton a tree when direction is ignored?

    Returns (True, "") or (False, reason).  Self-loops and antiparallel
    edge pairs count as cycles.
    """
    ids, edges = graph.component(sort)
    for u, v in edges:
        if u == v:
            return False, f"self-loop at {u}"
    und = {frozenset(e) for e in edges}
    if len(und) != len(edges):
        return False, "antiparallel edge pair"
    if len(und) != len(ids) - 1:
        return False, f"{len(ids)} worlds but {len(und)} undirected edges"
    if ids:
        adj = {i: set() for i in ids}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(ids):
            return False, "component is not connected"
    return True, ""


def graph_to_model(graph: ModelGraph, sort: int):
    """Extract the Kripke model of one verified component.

    Atoms on a world's left side are true there, the relation is the
    reflexive-transitive closure of the component edges, and the returned
    world is the component root, where the target sequent is falsified.
    """
    ids, edges = graph.component(sort)
    val = {
        i: {f.name for f in graph.worlds[i].sequent.plain_lhs if isinstance(f, Atom)}
        for i in ids
    }
    model = KripkeModel(ids, edges, val)
    ok, witness = check_persistence(model)
    if not ok:
        raise VerificationError(f"extracted model breaks persistence at {witness!r}")
    return model, graph.roots[sort]


def countermodel(seq: Sequent, budget=None, cache: Optional[BuildCache] = None):
    """Verified countermodel for a non-derivable sequent.

    Runs the model graph construction, picks the least-sorted component,
    verifies the graph properties and the di-tree shape, extracts the
    model, and confirms it falsifies the input at the root.  Any failure
    raises VerificationError; the caller never sees an unchecked model.

    Returns (model, world, graph).
    """
    graph, _ = mgc(seq, budget, cache)
    if not graph.roots:
        raise InternalError("model graph construction returned no components")
    sort = min(graph.roots)
    ok, report = verify_model_graph(graph, sort)
    if not ok:
        raise VerificationError(report)
    ok, reason = is_ditree(graph, sort)
    if not ok:
        raise VerificationError(f"component {sort} is not a di-tree: {reason}")
    model, world = graph_to_model(graph, sort)
    if not falsifies(model, world, seq):
        raise VerificationError(
            f"extracted model does not falsify the input at world {world}"
        )
    return model, world, graph
