"""Sequents, rule identifiers, applicability tests, and premise construction.

A sequent is a pair of finite formula sets.  Besides plain formulas the
left side may carry at most one big-disjunction wrapper and the right
side at most one big-conjunction wrapper; these encode search results
handed back by the variable mechanism and are decomposed immediately by
the BigOrL / BigAndR rules.

Rule inventory and classification:

    axioms        Id, BotL, TopR                      close a branch
    special       BigAndR, BigOrL                     unpack a wrapper
    static        AndL, OrR, ImpRI, ExclLI            single premise
                  OrL, AndR, ImpL, ExclR              two premises
    transitional  ImpR, ExclL                         change of world
    leaf          Ret                                 open leaf, hands back
                                                      the sequent as variables

Static rules keep their principal formula, so a rule instance is applied
only when every premise would add a formula that is not already present
(the loop check).  Transitional rules are existential: each instance is
attempted independently, and a single derivable attempt suffices.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple, Optional

from .formula import BOT, TOP, And, Excl, Formula, Imp, Or


class BigOr:
    """Big disjunction over formula sets; appears on the left side only.

    Forced at a world when some member set is entirely forced.
    """

    __slots__ = ("member_sets", "_hash")

    def __init__(self, member_sets):
        ms = frozenset(frozenset(m) for m in member_sets)
        if not ms:
            raise ValueError("wrapper needs at least one member set")
        self.member_sets = ms
        self._hash = hash(("BigOr", ms))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, BigOr):
            return self.member_sets == other.member_sets
        return NotImplemented

    def sort_key(self):
        return (7, _members_key(self.member_sets))

    def __repr__(self):
        return f"BigOr({_members_repr(self.member_sets)})"


class BigAnd:
    """Big conjunction over formula sets; appears on the right side only.

    Rejected at a world when some member set is entirely rejected.
    """

    __slots__ = ("member_sets", "_hash")

    def __init__(self, member_sets):
        ms = frozenset(frozenset(m) for m in member_sets)
        if not ms:
            raise ValueError("wrapper needs at least one member set")
        self.member_sets = ms
        self._hash = hash(("BigAnd", ms))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, BigAnd):
            return self.member_sets == other.member_sets
        return NotImplemented

    def sort_key(self):
        return (8, _members_key(self.member_sets))

    def __repr__(self):
        return f"BigAnd({_members_repr(self.member_sets)})"


def _members_key(member_sets):
    return tuple(sorted(tuple(sorted(f.sort_key() for f in m)) for m in member_sets))


def _members_repr(member_sets):
    groups = sorted(member_sets, key=lambda m: tuple(sorted(f.sort_key() for f in m)))
    return "{" + ", ".join("{" + ", ".join(map(repr, sorted(m, key=Formula.sort_key))) + "}" for m in groups) + "}"


def sorted_members(member_sets):
    """Member sets in canonical order (used for premise order and printing)."""
    return sorted(member_sets, key=lambda m: tuple(sorted(f.sort_key() for f in m)))


class VarSets(NamedTuple):
    """Variable values handed back by open search branches.

    `lhs_sets` collects left sides of open leaves (feeds big disjunctions),
    `rhs_sets` right sides (feeds big conjunctions); both are frozensets of
    frozensets of plain formulas.
    """

    lhs_sets: frozenset
    rhs_sets: frozenset


EMPTY_VARS = VarSets(frozenset(), frozenset())


def union_vars(parts) -> VarSets:
    lhs = frozenset()
    rhs = frozenset()
    for v in parts:
        lhs |= v.lhs_sets
        rhs |= v.rhs_sets
    return VarSets(lhs, rhs)


class Sequent:
    """An immutable two-sided sequent over formulas plus optional wrappers."""

    __slots__ = ("lhs", "rhs", "plain_lhs", "plain_rhs", "_hash", "_deg")

    def __init__(self, lhs, rhs):
        lhs = frozenset(lhs)
        rhs = frozenset(rhs)
        self.lhs = lhs
        self.rhs = rhs
        self._hash = hash((lhs, rhs))
        # wrapper-free sides (the common case) share the frozenset itself
        for x in lhs:
            if not isinstance(x, Formula):
                lhs = frozenset(y for y in lhs if isinstance(y, Formula))
                break
        self.plain_lhs = lhs
        for x in rhs:
            if not isinstance(x, Formula):
                rhs = frozenset(y for y in rhs if isinstance(y, Formula))
                break
        self.plain_rhs = rhs
        self._deg = None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Sequent):
            return self.lhs == other.lhs and self.rhs == other.rhs
        return NotImplemented

    def lhs_wrapper(self) -> Optional[BigOr]:
        if self.plain_lhs is self.lhs:
            return None
        for x in self.lhs:
            if isinstance(x, BigOr):
                return x
        return None

    def rhs_wrapper(self) -> Optional[BigAnd]:
        if self.plain_rhs is self.rhs:
            return None
        for x in self.rhs:
            if isinstance(x, BigAnd):
                return x
        return None

    @property
    def degree(self) -> int:
        """Largest arrow count of any formula present, wrapper members included."""
        d = self._deg
        if d is None:
            d = 0
            for side in (self.lhs, self.rhs):
                for x in side:
                    if isinstance(x, Formula):
                        if x.degree > d:
                            d = x.degree
                    else:
                        for m in x.member_sets:
                            for f in m:
                                if f.degree > d:
                                    d = f.degree
            self._deg = d
        return d

    def sort_key(self):
        return (
            tuple(sorted(x.sort_key() for x in self.lhs)),
            tuple(sorted(x.sort_key() for x in self.rhs)),
        )

    def __repr__(self):
        from .syntax import print_sequent

        return f"<{print_sequent(self)}>"


class RuleId(str, Enum):
    ID = "Id"
    BOT_L = "BotL"
    TOP_R = "TopR"
    AND_L = "AndL"
    AND_R = "AndR"
    OR_L = "OrL"
    OR_R = "OrR"
    IMP_L = "ImpL"
    EXCL_R = "ExclR"
    IMP_RI = "ImpRI"
    EXCL_LI = "ExclLI"
    IMP_R = "ImpR"
    EXCL_L = "ExclL"
    BIG_AND_R = "BigAndR"
    BIG_OR_L = "BigOrL"
    RET = "Ret"


AXIOM_RULES = frozenset({RuleId.ID, RuleId.BOT_L, RuleId.TOP_R})
SPECIAL_RULES = frozenset({RuleId.BIG_AND_R, RuleId.BIG_OR_L})
NONBRANCHING_STATIC = frozenset({RuleId.AND_L, RuleId.OR_R, RuleId.IMP_RI, RuleId.EXCL_LI})
BRANCHING_STATIC = frozenset({RuleId.OR_L, RuleId.AND_R, RuleId.IMP_L, RuleId.EXCL_R})
STATIC_RULES = NONBRANCHING_STATIC | BRANCHING_STATIC
TRANSITIONAL_RULES = frozenset({RuleId.IMP_R, RuleId.EXCL_L})
LEAF_RULES = AXIOM_RULES | {RuleId.RET}

DERIVABLE = "derivable"
OPEN = "open"


def consistent(seq: Sequent) -> bool:
    """No falsum on the left, no verum on the right, no shared formula."""
    lhs = seq.plain_lhs
    rhs = seq.plain_rhs
    return BOT not in lhs and TOP not in rhs and lhs.isdisjoint(rhs)


def axiom_rule(seq: Sequent) -> Optional[RuleId]:
    """The axiom closing this sequent, if any (Id before BotL before TopR)."""
    if not seq.plain_lhs.isdisjoint(seq.plain_rhs):
        return RuleId.ID
    if BOT in seq.plain_lhs:
        return RuleId.BOT_L
    if TOP in seq.plain_rhs:
        return RuleId.TOP_R
    return None


def applicable(seq: Sequent, rule: RuleId, principal=None) -> bool:
    """Whether the rule instance applies, including the loop check.

    Static and special rules apply only when every premise would add a
    formula not already present.  Transitional rules apply when the state
    is not already its own witness: ImpR needs the antecedent absent from
    the left, ExclL the subtrahend absent from the right.
    """
    lhs = seq.plain_lhs
    rhs = seq.plain_rhs
    if rule is RuleId.ID:
        return not lhs.isdisjoint(rhs)
    if rule is RuleId.BOT_L:
        return BOT in lhs
    if rule is RuleId.TOP_R:
        return TOP in rhs
    if rule is RuleId.AND_L:
        return principal in lhs and isinstance(principal, And) and not (
            principal.left in lhs and principal.right in lhs
        )
    if rule is RuleId.OR_R:
        return principal in rhs and isinstance(principal, Or) and not (
            principal.left in rhs and principal.right in rhs
        )
    if rule is RuleId.IMP_RI:
        return principal in rhs and isinstance(principal, Imp) and principal.right not in rhs
    if rule is RuleId.EXCL_LI:
        return principal in lhs and isinstance(principal, Excl) and principal.left not in lhs
    if rule is RuleId.AND_R:
        return (
            principal in rhs
            and isinstance(principal, And)
            and principal.left not in rhs
            and principal.right not in rhs
        )
    if rule is RuleId.OR_L:
        return (
            principal in lhs
            and isinstance(principal, Or)
            and principal.left not in lhs
            and principal.right not in lhs
        )
    if rule is RuleId.IMP_L:
        return (
            principal in lhs
            and isinstance(principal, Imp)
            and principal.left not in rhs
            and principal.right not in lhs
        )
    if rule is RuleId.EXCL_R:
        return (
            principal in rhs
            and isinstance(principal, Excl)
            and principal.right not in lhs
            and principal.left not in rhs
        )
    if rule is RuleId.IMP_R:
        return principal in rhs and isinstance(principal, Imp) and principal.left not in lhs
    if rule is RuleId.EXCL_L:
        return principal in lhs and isinstance(principal, Excl) and principal.right not in rhs
    if rule is RuleId.BIG_AND_R:
        w = principal if principal is not None else seq.rhs_wrapper()
        return (
            isinstance(w, BigAnd)
            and w in seq.rhs
            and all(not m.issubset(rhs) for m in w.member_sets)
        )
    if rule is RuleId.BIG_OR_L:
        w = principal if principal is not None else seq.lhs_wrapper()
        return (
            isinstance(w, BigOr)
            and w in seq.lhs
            and all(not m.issubset(lhs) for m in w.member_sets)
        )
    if rule is RuleId.RET:
        return ret_state(seq)
    raise ValueError(f"unknown rule {rule!r}")


def next_static(seq: Sequent):
    """The static rule instance the strategy applies next, or None.

    Non-branching instances take priority over branching ones; within a
    class the canonically least principal wins.
    """
    lhs = seq.plain_lhs
    rhs = seq.plain_rhs
    nb = nb_key = br = br_key = None
    for f in lhs:
        r = f.rank
        if r == 3:  # And
            if f.left not in lhs or f.right not in lhs:
                k = f.sort_key()
                if nb is None or k < nb_key:
                    nb, nb_key = (RuleId.AND_L, f), k
        elif r == 4:  # Or
            if nb is None and f.left not in lhs and f.right not in lhs:
                k = f.sort_key()
                if br is None or k < br_key:
                    br, br_key = (RuleId.OR_L, f), k
        elif r == 5:  # Imp
            if nb is None and f.left not in rhs and f.right not in lhs:
                k = f.sort_key()
                if br is None or k < br_key:
                    br, br_key = (RuleId.IMP_L, f), k
        elif r == 6:  # Excl
            if f.left not in lhs:
                k = f.sort_key()
                if nb is None or k < nb_key:
                    nb, nb_key = (RuleId.EXCL_LI, f), k
    for f in rhs:
        r = f.rank
        if r == 3:
            if nb is None and f.left not in rhs and f.right not in rhs:
                k = f.sort_key()
                if br is None or k < br_key:
                    br, br_key = (RuleId.AND_R, f), k
        elif r == 4:
            if f.left not in rhs or f.right not in rhs:
                k = f.sort_key()
                if nb is None or k < nb_key:
                    nb, nb_key = (RuleId.OR_R, f), k
        elif r == 5:
            if f.right not in rhs:
                k = f.sort_key()
                if nb is None or k < nb_key:
                    nb, nb_key = (RuleId.IMP_RI, f), k
        elif r == 6:
            if nb is None and f.right not in lhs and f.left not in rhs:
                k = f.sort_key()
                if br is None or k < br_key:
                    br, br_key = (RuleId.EXCL_R, f), k
    return nb or br


def special_rule(seq: Sequent):
    """The wrapper-unpacking rule to apply, or None."""
    w = seq.rhs_wrapper()
    if w is not None:
        return (RuleId.BIG_AND_R, w)
    w = seq.lhs_wrapper()
    if w is not None:
        return (RuleId.BIG_OR_L, w)
    return None


def transitional_candidates(seq: Sequent):
    """All applicable transitional instances in canonical principal order."""
    out = []
    lhs = seq.plain_lhs
    rhs = seq.plain_rhs
    for f in rhs:
        if f.rank == 5 and f.left not in lhs:
            out.append((RuleId.IMP_R, f))
    for f in lhs:
        if f.rank == 6 and f.right not in rhs:
            out.append((RuleId.EXCL_L, f))
    out.sort(key=lambda c: c[1].sort_key())
    return out


def ret_state(seq: Sequent) -> bool:
    """True when only blocked rules remain, so the search returns the sequent."""
    return (
        axiom_rule(seq) is None
        and special_rule(seq) is None
        and next_static(seq) is None
        and not transitional_candidates(seq)
    )


def is_saturated(seq: Sequent) -> bool:
    """Consistent and closed under every static rule (no wrapper present)."""
    if seq.lhs_wrapper() is not None or seq.rhs_wrapper() is not None:
        return False
    return consistent(seq) and next_static(seq) is None


def premises(seq: Sequent, rule: RuleId, principal) -> tuple:
    """Premises of a static or wrapper rule instance, in fixed order.

    Transitional rules are not handled here: their left premise comes from
    `transitional_left` and the conditional right one from
    `transitional_right`.
    """
    lhs = seq.lhs
    rhs = seq.rhs
    f = principal
    if rule is RuleId.AND_L:
        return (Sequent(lhs | {f.left, f.right}, rhs),)
    if rule is RuleId.OR_R:
        return (Sequent(lhs, rhs | {f.left, f.right}),)
    if rule is RuleId.IMP_RI:
        return (Sequent(lhs, rhs | {f.right}),)
    if rule is RuleId.EXCL_LI:
        return (Sequent(lhs | {f.left}, rhs),)
    if rule is RuleId.AND_R:
        return (Sequent(lhs, rhs | {f.left}), Sequent(lhs, rhs | {f.right}))
    if rule is RuleId.OR_L:
        return (Sequent(lhs | {f.left}, rhs), Sequent(lhs | {f.right}, rhs))
    if rule is RuleId.IMP_L:
        return (Sequent(lhs, rhs | {f.left}), Sequent(lhs | {f.right}, rhs))
    if rule is RuleId.EXCL_R:
        return (Sequent(lhs | {f.right}, rhs), Sequent(lhs, rhs | {f.left}))
    if rule is RuleId.BIG_AND_R:
        rest = rhs - {f}
        return tuple(Sequent(lhs, rest | m) for m in sorted_members(f.member_sets))
    if rule is RuleId.BIG_OR_L:
        rest = lhs - {f}
        return tuple(Sequent(rest | m, rhs) for m in sorted_members(f.member_sets))
    raise ValueError(f"premises() does not handle {rule!r}")


def transitional_left(seq: Sequent, rule: RuleId, principal) -> Sequent:
    """Left premise of a transitional instance; the other side is dropped."""
    if rule is RuleId.IMP_R:
        return Sequent(seq.lhs | {principal.left}, frozenset((principal.right,)))
    if rule is RuleId.EXCL_L:
        return Sequent(frozenset((principal.left,)), seq.rhs | {principal.right})
    raise ValueError(f"not a transitional rule: {rule!r}")


def transitional_right(seq: Sequent, rule: RuleId, principal, left_vars: VarSets):
    """Right premise built from the left premise's variables, or None.

    Created only when the variable value is nonempty and every member set
    adds something new to the conclusion's side, i.e. the wrapper rule on
    the created premise is guaranteed applicable.
    """
    if rule is RuleId.IMP_R:
        members = left_vars.rhs_sets
        if members and all(not m.issubset(seq.plain_rhs) for m in members):
            return Sequent(seq.lhs, seq.rhs | {BigAnd(members)})
        return None
    if rule is RuleId.EXCL_L:
        members = left_vars.lhs_sets
        if members and all(not m.issubset(seq.plain_lhs) for m in members):
            return Sequent(seq.lhs | {BigOr(members)}, seq.rhs)
        return None
    raise ValueError(f"not a transitional rule: {rule!r}")


def ret_vars(seq: Sequent) -> VarSets:
    """Variable value handed back by an open leaf: the sequent's two sides."""
    return VarSets(frozenset((seq.plain_lhs,)), frozenset((seq.plain_rhs,)))
