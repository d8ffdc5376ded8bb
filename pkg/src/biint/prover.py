"""Backward proof search with the variable-passing strategy.

Per node, in priority order: close by an axiom; unpack a wrapper; apply
the least non-branching static instance, else the least branching one;
otherwise try every transitional instance in canonical order, stopping at
the first derivable attempt.  When nothing applies, the branch returns
open (Ret) and hands its two sides back as variable values.

A transitional attempt first searches its left premise.  A derivable left
premise settles the attempt.  An open one returns variable values; when
they are nonempty and every member set would add something new to the
conclusion, a right premise is created carrying the corresponding wrapper
and the attempt's outcome is the right premise's.  Otherwise the attempt
is open with the conclusion's own sides as variables.

Search size is capped by a node budget; exceeding it is an internal
error, never a verdict.  Instrumented searches additionally assert the
termination measures: sequent degree never increases from conclusion to
premise, and across any interleaved same-direction transitional pair
separated by an opposite one, the third left premise's degree is strictly
below the first conclusion's.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .formula import BOT, TOP
from .sequent import (
    DERIVABLE,
    EMPTY_VARS,
    OPEN,
    RuleId,
    Sequent,
    VarSets,
    applicable,
    next_static,
    premises,
    ret_vars,
    special_rule,
    transitional_candidates,
    transitional_left,
    transitional_right,
    union_vars,
)

DEFAULT_NODE_BUDGET = 1_000_000

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class InternalError(RuntimeError):
    """An invariant failed; the result must not be trusted as a verdict."""


class BudgetExceededError(InternalError):
    """Search exceeded its node budget."""


class InstrumentationError(InternalError):
    """A termination measure was violated during an instrumented search."""


class VerificationError(InternalError):
    """An emitted artifact failed its independent semantic check."""


class ContractViolation(InternalError):
    """A caller broke a precondition (e.g. saturating a derivable sequent)."""


class Budget:
    """Shared node counter; spend() raises once the limit is passed."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int = DEFAULT_NODE_BUDGET):
        self.limit = int(limit)
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"node budget of {self.limit} exhausted; the input is too large "
                "for this configuration, raise --budget"
            )


UNIVERSAL = "universal"
EXISTENTIAL = "existential"
LEAF = "leaf"

_BRANCHING = {
    RuleId.ID: LEAF,
    RuleId.BOT_L: LEAF,
    RuleId.TOP_R: LEAF,
    RuleId.RET: LEAF,
    RuleId.IMP_R: EXISTENTIAL,
    RuleId.EXCL_L: EXISTENTIAL,
}


class DerivationNode:
    """One node of the recorded search tree.

    `rule` is None for a grouping node that holds several transitional
    attempts at the same sequent (rendered as "Alt"); `right_created`
    records, on transitional nodes, whether the variable hand-off built a
    right premise.
    """

    __slots__ = ("sequent", "rule", "principal", "premises", "status", "vars", "right_created", "branching")

    def __init__(self, sequent, rule, principal, premises_, status, vars_, right_created=None):
        self.sequent = sequent
        self.rule = rule
        self.principal = principal
        self.premises = tuple(premises_)
        self.status = status
        self.vars = vars_
        self.right_created = right_created
        self.branching = EXISTENTIAL if rule is None else _BRANCHING.get(rule, UNIVERSAL)

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

    def __repr__(self):
        name = self.rule.value if self.rule is not None else "Alt"
        return f"<{name} {self.status} {self.sequent!r}>"


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    max_depth: int = 0
    transitional_events: int = 0
    interleaved_triples: int = 0


class ProofResult(NamedTuple):
    status: str
    root: DerivationNode
    stats: Optional[SearchStats]


class _Search:
    def __init__(self, budget: Budget, instrument: bool):
        self.budget = budget
        self.instrument = instrument
        self.stats = SearchStats() if instrument else None
        self.events = []  # (direction, conclusion degree, left premise degree)
        # status and variables depend only on the sequent, so uninstrumented
        # searches may share results; instrumented ones must revisit every
        # occurrence to check the termination measures in context
        self.memo = None if instrument else {}

    def run(self, seq: Sequent) -> DerivationNode:
        return self.search(seq, 1)

    def search(self, seq: Sequent, depth: int) -> DerivationNode:
        memo = self.memo
        if memo is not None:
            node = memo.get(seq)
            if node is not None:
                return node
        node = self._expand(seq, depth)
        if memo is not None:
            memo[seq] = node
        return node

    def _expand(self, seq: Sequent, depth: int) -> DerivationNode:
        b = self.budget
        b.used += 1
        if b.used > b.limit:
            b.spend(0)
        if self.instrument:
            self.stats.nodes_expanded += 1
            if depth > self.stats.max_depth:
                self.stats.max_depth = depth
        lhs = seq.plain_lhs
        rhs = seq.plain_rhs
        if not lhs.isdisjoint(rhs):
            return DerivationNode(seq, RuleId.ID, None, (), DERIVABLE, EMPTY_VARS)
        if BOT in lhs:
            return DerivationNode(seq, RuleId.BOT_L, None, (), DERIVABLE, EMPTY_VARS)
        if TOP in rhs:
            return DerivationNode(seq, RuleId.TOP_R, None, (), DERIVABLE, EMPTY_VARS)
        if lhs is not seq.lhs or rhs is not seq.rhs:
            rule, wrapper = special_rule(seq)
            if not applicable(seq, rule, wrapper):
                raise InternalError(f"wrapper present but {rule.value} blocked at {seq!r}")
            return self.universal(seq, rule, wrapper, depth)
        st = next_static(seq)
        if st is not None:
            return self.universal(seq, st[0], st[1], depth)
        cands = transitional_candidates(seq)
        if not cands:
            return DerivationNode(seq, RuleId.RET, None, (), OPEN, ret_vars(seq))
        attempts = []
        for rule, f in cands:
            node = self.attempt(seq, rule, f, depth)
            attempts.append(node)
            if node.status == DERIVABLE:
                break
        if len(attempts) == 1:
            return attempts[0]
        if attempts[-1].status == DERIVABLE:
            return DerivationNode(seq, None, None, attempts, DERIVABLE, EMPTY_VARS)
        return DerivationNode(
            seq, None, None, attempts, OPEN, union_vars(a.vars for a in attempts)
        )

    def universal(self, seq, rule, principal, depth) -> DerivationNode:
        instrument = self.instrument
        children = []
        all_derivable = True
        for p in premises(seq, rule, principal):
            if instrument:
                self.check_degree(seq, p, rule)
            child = self.search(p, depth + 1)
            children.append(child)
            if child.status != DERIVABLE:
                all_derivable = False
        if all_derivable:
            return DerivationNode(seq, rule, principal, children, DERIVABLE, EMPTY_VARS)
        vars_ = union_vars(c.vars for c in children if c.status == OPEN)
        return DerivationNode(seq, rule, principal, children, OPEN, vars_)

    def attempt(self, seq, rule, principal, depth) -> DerivationNode:
        left = transitional_left(seq, rule, principal)
        if self.instrument:
            self.check_degree(seq, left, rule)
            self.push_event(rule, seq.degree, left.degree)
            try:
                left_node = self.search(left, depth + 1)
            finally:
                self.events.pop()
        else:
            left_node = self.search(left, depth + 1)
        if left_node.status == DERIVABLE:
            return DerivationNode(
                seq, rule, principal, (left_node,), DERIVABLE, EMPTY_VARS, right_created=False
            )
        right = transitional_right(seq, rule, principal, left_node.vars)
        if right is None:
            return DerivationNode(
                seq, rule, principal, (left_node,), OPEN, ret_vars(seq), right_created=False
            )
        if self.instrument:
            self.check_degree(seq, right, rule)
        right_node = self.search(right, depth + 1)
        vars_ = EMPTY_VARS if right_node.status == DERIVABLE else right_node.vars
        return DerivationNode(
            seq, rule, principal, (left_node, right_node), right_node.status, vars_, right_created=True
        )

    def check_degree(self, conclusion, premise, rule):
        if premise.degree > conclusion.degree:
            raise InstrumentationError(
                f"degree increased from {conclusion.degree} to {premise.degree} "
                f"applying {rule.value} at {conclusion!r}"
            )

    def push_event(self, rule, conclusion_degree, left_degree):
        # Find the nearest opposite-direction event, then the nearest
        # same-direction event before it; degrees are non-increasing along
        # the branch, so checking that pair covers every interleaved triple.
        self.stats.transitional_events += 1
        stack = self.events
        for i in range(len(stack) - 1, -1, -1):
            if stack[i][0] is not rule:
                for j in range(i - 1, -1, -1):
                    if stack[j][0] is rule:
                        self.stats.interleaved_triples += 1
                        if left_degree >= stack[j][1]:
                            raise InstrumentationError(
                                "interleaved transitional degree did not drop: "
                                f"{stack[j][1]} then {left_degree} via {rule.value}"
                            )
                        break
                break
        stack.append((rule, conclusion_degree, left_degree))


def prove(seq: Sequent, budget=DEFAULT_NODE_BUDGET, instrument: bool = False, memo=None) -> ProofResult:
    """Decide a sequent; returns the full derivation and final variables.

    `budget` caps the number of expanded nodes (an int, or a shared Budget)
    and overrunning it raises BudgetExceededError rather than producing a
    verdict.  With `instrument` set, termination measures are asserted and
    search statistics collected.  `memo` replaces the search's private
    sequent-to-result table with a caller-owned dict so repeated calls can
    share work; it cannot be combined with `instrument`, which must expand
    every occurrence to check the measures in context.
    """
    b = budget if isinstance(budget, Budget) else Budget(budget)
    s = _Search(b, instrument)
    if memo is not None:
        if instrument:
            raise ValueError("a shared memo would skip instrumented expansions")
        s.memo = memo
    root = s.run(seq)
    if root.status == DERIVABLE and root.vars != EMPTY_VARS:
        raise InternalError("derivable root carries variable values")
    return ProofResult(root.status, root, s.stats)


class Verdict(NamedTuple):
    """Outcome of prove_formula: the verdict plus its checked artifacts."""

    status: str
    valid: bool
    result: ProofResult
    model: object
    world: object
    graph: object


def prove_formula(f, budget=DEFAULT_NODE_BUDGET, instrument: bool = False) -> Verdict:
    """Prove `|- f`; on an open verdict attach a verified countermodel.

    The countermodel is produced by the model-graph construction and is
    checked twice before being returned: the graph properties are verified,
    and the extracted model must falsify the formula at its root world.
    """
    seq = Sequent(frozenset(), frozenset((f,)))
    return prove_sequent(seq, budget=budget, instrument=instrument)


def prove_sequent(seq: Sequent, budget=DEFAULT_NODE_BUDGET, instrument: bool = False) -> Verdict:
    """Like prove_formula for an arbitrary plain sequent."""
    limit = budget.limit if isinstance(budget, Budget) else int(budget)
    res = prove(seq, budget=budget, instrument=instrument)
    if res.status == DERIVABLE:
        return Verdict(DERIVABLE, True, res, None, None, None)
    from .countermodel import countermodel

    model, world, graph = countermodel(seq, budget=Budget(limit))
    return Verdict(OPEN, False, res, model, world, graph)
