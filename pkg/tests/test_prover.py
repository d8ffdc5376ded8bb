"""Search engine tests against hand-derived traces and structural invariants."""

import pytest

from biint.formula import BOT, TOP, And, Atom, Excl, Imp
from biint.prover import (
    Budget,
    BudgetExceededError,
    DerivationNode,
    InternalError,
    ProofResult,
    SearchStats,
    prove,
    prove_formula,
    prove_sequent,
)
from biint.semantics import falsifies
from biint.sequent import DERIVABLE, EMPTY_VARS, OPEN, BigAnd, RuleId, Sequent, VarSets
from biint.syntax import parse, parse_sequent

p, q, r = Atom("p"), Atom("q"), Atom("r")

INTERACTION = parse("p -> (q | (r -> ((p -< q) & r)))")


def fs(*xs):
    return frozenset(xs)


def rhs_seq(f):
    return Sequent(fs(), fs(f))


# ------------------------------------------------------------------- leaf work


def test_axiom_leaves():
    res = prove(parse_sequent("p |- p"))
    assert res.status == DERIVABLE
    assert res.root.rule is RuleId.ID and res.root.premises == ()
    assert prove(parse_sequent("false |- q")).root.rule is RuleId.BOT_L
    assert prove(parse_sequent("p |- true")).root.rule is RuleId.TOP_R
    # Id wins when several axioms match at once
    assert prove(parse_sequent("p, false |- p")).root.rule is RuleId.ID


def test_ret_leaf_hands_back_sides():
    res = prove(parse_sequent("p, q |- r"))
    assert res.status == OPEN
    assert res.root.rule is RuleId.RET
    assert res.root.vars == VarSets(fs(fs(p, q)), fs(fs(r)))
    assert res.root.branching == "leaf"


def test_derivable_root_has_empty_vars():
    res = prove(rhs_seq(parse("p -> p")))
    assert res.status == DERIVABLE and res.root.vars == EMPTY_VARS


# ------------------------------------------------------------- interaction run


def test_interaction_formula_derivable():
    res = prove(rhs_seq(INTERACTION))
    assert res.status == DERIVABLE


def test_interaction_leaf_profile():
    """The strategy's tree closes with Id everywhere except two Ret leaves."""
    res = prove(rhs_seq(INTERACTION))
    leaves = [n for n in res.root.walk() if not n.premises]
    rules = sorted(n.rule.value for n in leaves)
    assert set(rules) == {"Id", "Ret"}
    assert rules.count("Id") == 13 and rules.count("Ret") == 2


def test_interaction_ret_assignment_feeds_big_and():
    excl = Excl(p, q)
    member = fs(And(excl, r), excl)
    res = prove(rhs_seq(INTERACTION))
    rets = [n for n in res.root.walk() if n.rule is RuleId.RET]
    handing = [n for n in rets if n.vars.rhs_sets == fs(member)]
    assert handing, "no Ret leaf handed back the exclusion member"
    assert all(n.vars.lhs_sets == fs(fs(p, r, q)) for n in handing)
    # the created right premise consumes exactly that member set
    bigs = [n for n in res.root.walk() if n.rule is RuleId.BIG_AND_R]
    assert any(n.principal == BigAnd(fs(member)) for n in bigs)
    creators = [n for n in res.root.walk() if n.rule is RuleId.IMP_R and n.right_created]
    assert creators and all(len(n.premises) == 2 for n in creators)


def test_interaction_degrees_never_increase():
    res = prove(rhs_seq(INTERACTION), instrument=True)
    for node in res.root.walk():
        for child in node.premises:
            assert child.sequent.degree <= node.sequent.degree
    assert res.stats.transitional_events >= 1


# ---------------------------------------------------------- double-negation run

X = And(Excl(TOP, p), Excl(TOP, q))
ROUNDABOUT = Imp(Imp(X, BOT), BOT)  # |- p, ROUNDABOUT is not derivable


def test_roundabout_open_with_split_big_and():
    seq = Sequent(fs(), fs(p, ROUNDABOUT))
    res = prove(seq)
    assert res.status == OPEN
    bigs = [n for n in res.root.walk() if n.rule is RuleId.BIG_AND_R]
    assert len(bigs) == 1
    statuses = sorted(c.status for c in bigs[0].premises)
    assert statuses == [DERIVABLE, OPEN]


def test_roundabout_final_vars():
    # the open branch stalls at q |- p, ROUNDABOUT, false, X, true -< q and
    # hands both sides back unchanged (X re-entered via the wrapper member)
    seq = Sequent(fs(), fs(p, ROUNDABOUT))
    res = prove(seq)
    assert res.root.vars == VarSets(
        fs(fs(q)),
        fs(fs(p, ROUNDABOUT, BOT, X, Excl(TOP, q))),
    )


# ------------------------------------------------------------- attempt grouping


def test_single_attempt_keeps_its_own_node():
    res = prove(rhs_seq(parse("p -> q")))
    assert res.status == OPEN
    walk = list(res.root.walk())
    assert all(n.rule is not None for n in walk)
    imp_nodes = [n for n in walk if n.rule is RuleId.IMP_R]
    assert len(imp_nodes) == 1
    assert imp_nodes[0].right_created is False  # {q} already on the right


def test_failed_attempts_grouped_under_alt():
    res = prove(rhs_seq(parse("(p -> q) | (r -> q)")))
    assert res.status == OPEN
    alts = [n for n in res.root.walk() if n.rule is None]
    assert len(alts) == 1
    alt = alts[0]
    assert alt.branching == "existential"
    assert [n.rule for n in alt.premises] == [RuleId.IMP_R, RuleId.IMP_R]
    assert all(n.status == OPEN for n in alt.premises)
    assert "Alt" in repr(alt)
    # grouped vars are the union of the attempts'
    for a in alt.premises:
        assert a.vars.lhs_sets <= alt.vars.lhs_sets
        assert a.vars.rhs_sets <= alt.vars.rhs_sets


def test_attempts_stop_at_first_derivable():
    # canonical order tries p -> q first (fails), then q -> q (closes)
    res = prove(rhs_seq(parse("(p -> q) | (q -> q)")))
    assert res.status == DERIVABLE
    alts = [n for n in res.root.walk() if n.rule is None]
    assert len(alts) == 1
    assert [a.status for a in alts[0].premises] == [OPEN, DERIVABLE]
    assert alts[0].status == DERIVABLE and alts[0].vars == EMPTY_VARS


# ----------------------------------------------------------------- bookkeeping


def test_budget_exhaustion_raises():
    with pytest.raises(BudgetExceededError):
        prove(rhs_seq(INTERACTION), budget=5)


def test_budget_is_shared_state():
    b = Budget(10_000)
    prove(rhs_seq(parse("p -> p")), budget=b)
    used = b.used
    assert used > 0
    prove(rhs_seq(parse("q -> q")), budget=b)
    assert b.used > used


def test_stats_only_when_instrumented():
    assert prove(rhs_seq(p)).stats is None
    stats = prove(rhs_seq(INTERACTION), instrument=True).stats
    assert stats.nodes_expanded > 0
    assert stats.max_depth >= 3
    assert stats.interleaved_triples == 0


def test_shared_memo():
    memo = {}
    a = prove(rhs_seq(INTERACTION), memo=memo)
    assert a.status == DERIVABLE and len(memo) > 0
    before = len(memo)
    b = prove(rhs_seq(INTERACTION), memo=memo)
    assert b.status == DERIVABLE
    assert len(memo) == before  # pure replay, nothing new expanded
    assert b.root is memo[rhs_seq(INTERACTION)]


def test_shared_memo_rejected_when_instrumenting():
    with pytest.raises(ValueError):
        prove(rhs_seq(p), instrument=True, memo={})


# -------------------------------------------------------------------- verdicts


def test_prove_formula_attaches_verified_countermodel():
    v = prove_formula(parse("p | (p -> false)"))
    assert v.status == OPEN and v.valid is False
    assert v.model is not None and v.graph is not None
    assert falsifies(v.model, v.world, rhs_seq(parse("p | (p -> false)")))


def test_prove_formula_valid_has_no_model():
    v = prove_formula(parse("p -> p"))
    assert v.status == DERIVABLE and v.valid is True
    assert v.model is None and v.world is None and v.graph is None
    assert isinstance(v.result, ProofResult)


def test_prove_sequent_two_sided():
    v = prove_sequent(parse_sequent("p & q |- q & p"))
    assert v.valid is True
    v = prove_sequent(parse_sequent("p | q |- p"))
    assert v.valid is False
    assert falsifies(v.model, v.world, parse_sequent("p | q |- p"))
