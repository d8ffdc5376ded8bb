"""Formula terms for propositional bi-intuitionistic logic.

The core language has atoms, the constants top and bottom, conjunction,
disjunction, intuitionistic implication `->`, and exclusion `-<` (the dual
of implication).  Negations exist only at the surface-syntax level and are
removed by `desugar`: `!f` becomes `f -> bot` and the co-negation `~f`
becomes `top -< f`.

Formulas are immutable and compare structurally.  Hashes are computed at
construction; everything else (sort keys, subformula sets, degree, length)
is computed on first use and cached on the instance.
"""

from __future__ import annotations

from typing import Iterable, Iterator

_RANK_TOP = 0
_RANK_BOT = 1
_RANK_ATOM = 2
_RANK_AND = 3
_RANK_OR = 4
_RANK_IMP = 5
_RANK_EXCL = 6


class Formula:
    """Base class for core formulas."""

    __slots__ = ("_hash", "_skey", "_sf", "_deg", "_len")

    rank = -1

    def __hash__(self):
        return self._hash

    def sort_key(self):
        """Key for the canonical total order on formulas.

        Orders by constructor (top < bot < atoms < and < or < -> < -<),
        then recursively by subterms, atoms alphabetically by name.
        """
        k = self._skey
        if k is None:
            k = self._skey = self._build_skey()
        return k

    def subformulae(self) -> frozenset:
        """All subformulas, including the formula itself."""
        s = self._sf
        if s is None:
            s = self._sf = self._build_sf()
        return s

    @property
    def degree(self) -> int:
        """Number of -> and -< nodes in the formula."""
        d = self._deg
        if d is None:
            d = self._deg = self._build_degree()
        return d

    @property
    def length(self) -> int:
        """Number of nodes: leaves count one, each connective adds one."""
        n = self._len
        if n is None:
            n = self._len = self._build_length()
        return n


class Top(Formula):
    __slots__ = ()
    rank = _RANK_TOP

    def __init__(self):
        self._hash = hash((_RANK_TOP,))
        self._skey = (_RANK_TOP,)
        self._sf = None
        self._deg = 0
        self._len = 1

    def _build_sf(self):
        return frozenset((self,))

    def __eq__(self, other):
        if isinstance(other, Formula):
            return type(other) is Top
        return NotImplemented

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "true"


class Bot(Formula):
    __slots__ = ()
    rank = _RANK_BOT

    def __init__(self):
        self._hash = hash((_RANK_BOT,))
        self._skey = (_RANK_BOT,)
        self._sf = None
        self._deg = 0
        self._len = 1

    def _build_sf(self):
        return frozenset((self,))

    def __eq__(self, other):
        if isinstance(other, Formula):
            return type(other) is Bot
        return NotImplemented

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "false"


TOP = Top()
BOT = Bot()


class Atom(Formula):
    __slots__ = ("name",)
    rank = _RANK_ATOM

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((_RANK_ATOM, name))
        self._skey = None
        self._sf = None
        self._deg = 0
        self._len = 1

    def _build_skey(self):
        return (_RANK_ATOM, self.name)

    def _build_sf(self):
        return frozenset((self,))

    def __eq__(self, other):
        if isinstance(other, Formula):
            return type(other) is Atom and self.name == other.name
        return NotImplemented

    __hash__ = Formula.__hash__

    def __repr__(self):
        return self.name


class _Binary(Formula):
    __slots__ = ("left", "right")
    _arrow = 0
    _sym = "?"

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash((self.rank, left._hash, right._hash))
        self._skey = None
        self._sf = None
        self._deg = None
        self._len = None

    def _build_skey(self):
        return (self.rank, self.left.sort_key(), self.right.sort_key())

    def _build_sf(self):
        return self.left.subformulae() | self.right.subformulae() | {self}

    def _build_degree(self):
        return self.left.degree + self.right.degree + self._arrow

    def _build_length(self):
        return self.left.length + self.right.length + 1

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, Formula):
            return (
                type(other) is type(self)
                and self._hash == other._hash
                and self.left == other.left
                and self.right == other.right
            )
        return NotImplemented

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"({self.left!r} {self._sym} {self.right!r})"


class And(_Binary):
    __slots__ = ()
    rank = _RANK_AND
    _sym = "&"


class Or(_Binary):
    __slots__ = ()
    rank = _RANK_OR
    _sym = "|"


class Imp(_Binary):
    __slots__ = ()
    rank = _RANK_IMP
    _arrow = 1
    _sym = "->"


class Excl(_Binary):
    __slots__ = ()
    rank = _RANK_EXCL
    _arrow = 1
    _sym = "-<"


def dual(f: Formula) -> Formula:
    """Order-dual of a formula.

    Atoms are fixed, top and bottom swap, conjunction and disjunction swap,
    and each arrow reverses:  dual(a -> b) = dual(b) -< dual(a)  and
    dual(a -< b) = dual(b) -> dual(a).  Applying it twice is the identity.
    """
    r = f.rank
    if r == _RANK_ATOM:
        return f
    if r == _RANK_TOP:
        return BOT
    if r == _RANK_BOT:
        return TOP
    if r == _RANK_AND:
        return Or(dual(f.left), dual(f.right))
    if r == _RANK_OR:
        return And(dual(f.left), dual(f.right))
    if r == _RANK_IMP:
        return Excl(dual(f.right), dual(f.left))
    if r == _RANK_EXCL:
        return Imp(dual(f.right), dual(f.left))
    raise TypeError(f"not a formula: {f!r}")


def desugar(node) -> Formula:
    """Translate a surface-syntax node into a core formula.

    Surface nodes expose `op` in {atom, top, bot, not, conot, and, or, imp,
    excl}, with `name` on atoms, `left` on the unary ops, and `left`/`right`
    on the binary ones.  `not` maps to an implication into bottom, `conot`
    to an exclusion from top.
    """
    op = node.op
    if op == "atom":
        return Atom(node.name)
    if op == "top":
        return TOP
    if op == "bot":
        return BOT
    if op == "not":
        return Imp(desugar(node.left), BOT)
    if op == "conot":
        return Excl(TOP, desugar(node.left))
    left = desugar(node.left)
    right = desugar(node.right)
    if op == "and":
        return And(left, right)
    if op == "or":
        return Or(left, right)
    if op == "imp":
        return Imp(left, right)
    if op == "excl":
        return Excl(left, right)
    raise ValueError(f"unknown surface op {op!r}")


def subformulae(x) -> frozenset:
    """Subformula set of a formula, a member-set wrapper, or an iterable.

    Wrappers (objects exposing `member_sets`) contribute the subformulas of
    every member formula; the wrapper itself is not a formula and is not
    included.
    """
    if isinstance(x, Formula):
        return x.subformulae()
    out = frozenset()
    members = getattr(x, "member_sets", None)
    if members is not None:
        for m in members:
            for f in m:
                out |= f.subformulae()
        return out
    for item in x:
        out |= subformulae(item)
    return out


_OPS = None


def _ops():
    global _OPS
    if _OPS is None:
        _OPS = (And, Or, Imp, Excl)
    return _OPS


def enumerate_formulas(atoms: Iterable[str], max_connectives: int) -> Iterator[Formula]:
    """Yield every formula over `atoms` with at most `max_connectives` binary nodes.

    Deterministic order: by connective count, then constructor (&, |, ->, -<),
    then size of the left subterm, then recursively by the order of the parts.
    Leaves come first: atoms sorted by name, then top, then bottom.
    """
    if max_connectives < 0:
        return
    leaves = [Atom(a) for a in sorted(set(atoms))] + [TOP, BOT]
    yield from leaves
    # layers[i] holds all formulas with exactly i connectives; the final
    # layer is streamed instead of stored since nothing ever consumes it
    layers = [leaves]
    for n in range(1, max_connectives + 1):
        layer = [] if n < max_connectives else None
        for op in _ops():
            for i in range(n):
                lefts = layers[i]
                rights = layers[n - 1 - i]
                for l in lefts:
                    for r in rights:
                        f = op(l, r)
                        if layer is not None:
                            layer.append(f)
                        yield f
        if layer is not None:
            layers.append(layer)


def count_formulas(num_atoms: int, max_connectives: int) -> int:
    """Number of formulas enumerate_formulas yields for these bounds."""
    if max_connectives < 0:
        return 0
    leaves = num_atoms + 2
    per = [leaves]
    for n in range(1, max_connectives + 1):
        per.append(4 * sum(per[i] * per[n - 1 - i] for i in range(n)))
    return sum(per)
