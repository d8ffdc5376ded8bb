"""Kripke semantics: models, forcing, falsification, and a bounded oracle.

Frames are reflexive-transitive; the stored relation is closed at
construction, so callers may pass a skeleton.  Valuations must be
persistent (atoms true at a world stay true at its successors); that is
checked by `check_persistence`, not forced by the constructor, so that
externally supplied models can be validated and rejected gracefully.

Forcing is standard for the intuitionistic connectives; exclusion looks
backwards: w forces f -< g when some predecessor of w forces f and
rejects g.  The wrapper objects from the sequent layer are also handled:
a big disjunction is forced when some member set is entirely forced, a
big conjunction when every member set has a forced element.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional

from .formula import Atom, Formula
from .sequent import BigAnd, BigOr, Sequent


class ModelFormatError(ValueError):
    """Raised when model JSON is malformed or refers to unknown worlds."""


class KripkeModel:
    """Finite Kripke model over a reflexive-transitive frame."""

    __slots__ = ("worlds", "given_edges", "succ", "pred", "val")

    def __init__(self, worlds: Iterable, edges: Iterable, valuation):
        ws = sorted(set(worlds))
        if not ws:
            raise ModelFormatError("a model needs at least one world")
        self.worlds = tuple(ws)
        wset = set(ws)
        cleaned = []
        for e in edges:
            u, v = e
            if u not in wset or v not in wset:
                raise ModelFormatError(f"edge {(u, v)!r} mentions an unknown world")
            cleaned.append((u, v))
        self.given_edges = tuple(sorted(set(cleaned)))
        self.val = {}
        for w in ws:
            atoms = valuation.get(w, ()) if hasattr(valuation, "get") else ()
            self.val[w] = frozenset(str(a) for a in atoms)
        adj = {w: set() for w in ws}
        for u, v in self.given_edges:
            adj[u].add(v)
        succ = {}
        for w in ws:
            # reflexive-transitive closure by reachability
            seen = {w}
            stack = [w]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            succ[w] = frozenset(seen)
        self.succ = succ
        pred = {w: set() for w in ws}
        for w in ws:
            for v in succ[w]:
                pred[v].add(w)
        self.pred = {w: frozenset(p) for w, p in pred.items()}

    def __repr__(self):
        return f"KripkeModel(worlds={len(self.worlds)}, edges={list(self.given_edges)!r})"


def check_persistence(model: KripkeModel):
    """Validate that atomic truth persists along the relation.

    Returns (True, None) or (False, (world, successor, atom)) for the
    first violation in world order.
    """
    for w in model.worlds:
        vw = model.val[w]
        for v in sorted(model.succ[w]):
            missing = vw - model.val[v]
            if missing:
                return False, (w, v, sorted(missing)[0])
    return True, None


def forces(model: KripkeModel, world, f) -> bool:
    """Truth of a formula (or wrapper) at a world."""
    if isinstance(f, Formula):
        r = f.rank
        if r == 2:
            return f.name in model.val[world]
        if r == 0:
            return True
        if r == 1:
            return False
        if r == 3:
            return forces(model, world, f.left) and forces(model, world, f.right)
        if r == 4:
            return forces(model, world, f.left) or forces(model, world, f.right)
        if r == 5:
            return all(
                not forces(model, v, f.left) or forces(model, v, f.right)
                for v in model.succ[world]
            )
        if r == 6:
            return any(
                forces(model, u, f.left) and not forces(model, u, f.right)
                for u in model.pred[world]
            )
        raise TypeError(f"not a formula: {f!r}")
    if isinstance(f, BigOr):
        return any(all(forces(model, world, g) for g in m) for m in f.member_sets)
    if isinstance(f, BigAnd):
        return all(any(forces(model, world, g) for g in m) for m in f.member_sets)
    raise TypeError(f"not a formula: {f!r}")


def falsifies(model: KripkeModel, world, seq: Sequent) -> bool:
    """Every left-side item forced and every right-side item rejected at world."""
    return all(forces(model, world, f) for f in seq.lhs) and not any(
        forces(model, world, f) for f in seq.rhs
    )


def _transitive(succ) -> bool:
    for w in succ:
        ws = succ[w]
        for v in ws:
            if not succ[v] <= ws:
                return False
    return True


_FRAME_CACHE = {}


def _frames(n: int):
    """All reflexive-transitive relations on n worlds, in enumeration order.

    Relations are enumerated as bitmasks over the off-diagonal pairs
    (i, j), i != j, in row-major order, ascending; masks whose reflexive
    extension is not transitive are skipped.  Each entry is (edges, succ)
    with succ a tuple of successor frozensets.
    """
    cached = _FRAME_CACHE.get(n)
    if cached is not None:
        return cached
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        succ = {i: {i} for i in range(n)}
        for u, v in edges:
            succ[u].add(v)
        if not _transitive(succ):
            continue
        out.append((tuple(edges), tuple(frozenset(succ[i]) for i in range(n))))
    _FRAME_CACHE[n] = out
    return out


def atoms_of(x) -> list:
    """Sorted atom names occurring in a formula, wrapper, or sequent side."""
    from .formula import subformulae

    if isinstance(x, Sequent):
        names = {f.name for f in subformulae(x.lhs) | subformulae(x.rhs) if isinstance(f, Atom)}
    else:
        names = {f.name for f in subformulae(x) if isinstance(f, Atom)}
    return sorted(names)


def bounded_countermodel(
    seq: Sequent, max_worlds: int = 3, atoms: Optional[Iterable[str]] = None
):
    """Exhaustively search for a small countermodel to a sequent.

    Tries world counts 1..max_worlds; per count, every reflexive-transitive
    relation (ascending bitmask over off-diagonal pairs); per relation,
    every persistent valuation (ascending bitmask over (world, atom) slots,
    atoms sorted).  Returns the first (model, world) with
    falsifies(model, world, seq), or None.  Deterministic, so the witness
    for a given input never changes.
    """
    names = sorted(set(atoms)) if atoms is not None else atoms_of(seq)
    for n in range(1, max_worlds + 1):
        slots = [(w, a) for w in range(n) for a in names]
        for edges, succ in _frames(n):
            for vmask in range(1 << len(slots)):
                val = {w: set() for w in range(n)}
                for k in range(len(slots)):
                    if vmask >> k & 1:
                        w, a = slots[k]
                        val[w].add(a)
                if not all(
                    val[u] <= val[v] for u in range(n) for v in succ[u]
                ):
                    continue
                m = KripkeModel(range(n), edges, val)
                for w in range(n):
                    if falsifies(m, w, seq):
                        return m, w
    return None


def model_to_json(model: KripkeModel) -> str:
    """Serialize a model; the edge list is the skeleton as constructed."""
    data = {
        "worlds": [{"id": w, "atoms": sorted(model.val[w])} for w in model.worlds],
        "edges": [list(e) for e in model.given_edges],
    }
    return json.dumps(data, indent=2)


def model_from_json(text: str) -> KripkeModel:
    """Parse and structurally validate model JSON.

    Expected shape: {"worlds": [{"id": int, "atoms": [str]}], "edges":
    [[int, int]]}.  Raises ModelFormatError with a readable message on any
    deviation; persistence is a separate `check_persistence` call.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ModelFormatError("top level must be an object")
    worlds = data.get("worlds")
    edges = data.get("edges", [])
    if not isinstance(worlds, list) or not worlds:
        raise ModelFormatError('"worlds" must be a non-empty list')
    if not isinstance(edges, list):
        raise ModelFormatError('"edges" must be a list')
    ids = []
    val = {}
    for entry in worlds:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), int):
            raise ModelFormatError('each world needs an integer "id"')
        wid = entry["id"]
        if wid in val:
            raise ModelFormatError(f"duplicate world id {wid}")
        atoms = entry.get("atoms", [])
        if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
            raise ModelFormatError(f'world {wid}: "atoms" must be a list of strings')
        ids.append(wid)
        val[wid] = atoms
    pairs = []
    for e in edges:
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, int) for x in e)
        ):
            raise ModelFormatError("each edge must be a pair of world ids")
        if e[0] not in val or e[1] not in val:
            raise ModelFormatError(f"edge {e} mentions an unknown world")
        pairs.append((e[0], e[1]))
    return KripkeModel(ids, pairs, val)
