"""Model-graph construction tests: saturation, grafting, verification."""

import pytest

from biint.countermodel import (
    BuildCache,
    GraphWorld,
    ModelGraph,
    countermodel,
    graph_to_model,
    is_ditree,
    mgc,
    saturate,
    verify_model_graph,
)
from biint.prover import Budget, BudgetExceededError, ContractViolation, VerificationError
from biint.semantics import falsifies
from biint.sequent import Sequent, VarSets
from biint.syntax import parse, parse_sequent

LEM = parse_sequent("|- p | (p -> false)")
DNP = parse_sequent("|- ((p -> false) -> false) -> p")


def fs(*xs):
    return frozenset(xs)


def graph_of(*world_seqs, edges=(), root=0, target=Sequent((), ())):
    worlds = {i: GraphWorld(0, parse_sequent(t)) for i, t in enumerate(world_seqs)}
    return ModelGraph(worlds, set(edges), {0: root}, target)


# ------------------------------------------------------------------ saturation


def test_saturate_single_state():
    got = saturate(parse_sequent("|- p, p -> false"))
    assert got == [parse_sequent("|- p, p -> false, false")]


def test_saturate_splits_disjunction():
    got = saturate(parse_sequent("p | q |- r"))
    assert got == sorted(
        [parse_sequent("p | q, p |- r"), parse_sequent("p | q, q |- r")],
        key=Sequent.sort_key,
    )
    assert len(got) == 2


def test_saturate_drops_closed_branches():
    got = saturate(parse_sequent("p | q |- p"))
    assert got == [parse_sequent("p | q, q |- p")]


def test_saturate_rejects_derivable_input():
    with pytest.raises(ContractViolation):
        saturate(parse_sequent("|- p -> p"))


def test_saturate_budget():
    with pytest.raises(BudgetExceededError):
        saturate(parse_sequent("p | q |- r"), budget=1)


def test_saturate_status_cache_is_used():
    cache = {}
    saturate(parse_sequent("|- p, p -> false"), status_cache=cache)
    assert parse_sequent("|- p, p -> false, false") in cache
    # poisoned cache entries are trusted, proving they short-circuit prove()
    poisoned = {parse_sequent("|- p, p -> false, false"): "derivable"}
    with pytest.raises(ContractViolation):
        saturate(parse_sequent("|- p, p -> false"), status_cache=poisoned)


# ------------------------------------------------------------- frozen examples


def test_excluded_middle_model():
    model, world, graph = countermodel(LEM)
    assert world == 0
    assert model.worlds == (0, 1)
    assert model.given_edges == ((0, 1),)
    assert model.val == {0: frozenset(), 1: frozenset({"p"})}
    assert falsifies(model, world, LEM)
    assert graph.worlds[1].sequent == parse_sequent("p |- false")


def test_double_negation_model():
    """Recompute abandons three component attempts before settling."""
    model, world, graph = countermodel(DNP)
    assert model.worlds == (3, 4, 5, 6)
    assert world == 3
    assert model.given_edges == ((3, 4), (3, 5), (5, 6))
    assert model.val == {
        3: frozenset(),
        4: frozenset({"p"}),
        5: frozenset(),
        6: frozenset({"p"}),
    }
    assert graph.sorts() == [3]
    assert falsifies(model, world, DNP)
    ok, _ = verify_model_graph(graph, 3)
    assert ok
    assert is_ditree(graph, 3) == (True, "")


def test_countermodel_rejects_derivable_input():
    with pytest.raises(ContractViolation):
        countermodel(parse_sequent("p & q |- q"))


def test_mgc_returns_surviving_member_sets():
    graph, vars_ = mgc(parse_sequent("|- p"))
    assert vars_ == VarSets(fs(fs()), fs(fs(parse("p"))))
    assert len(graph.worlds) == 1


def test_two_sided_countermodel():
    seq = parse_sequent("p -> q |- q | (p -> false)")
    model, world, graph = countermodel(seq)
    assert falsifies(model, world, seq)
    ok, _ = verify_model_graph(graph, min(graph.roots))
    assert ok


# ----------------------------------------------------------- property failures


def test_verify_rejects_missing_component():
    g = graph_of("p |- q")
    assert verify_model_graph(g, 7)[0] is False
    g.roots.clear()
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "root" in reason


def test_verify_rejects_unsaturated_world():
    ok, reason = verify_model_graph(graph_of("p & q |- r"), 0)
    assert not ok and "not saturated" in reason


def test_verify_rejects_cross_component_edge():
    worlds = {0: GraphWorld(0, parse_sequent("p |- q")), 1: GraphWorld(1, parse_sequent("p |- q"))}
    g = ModelGraph(worlds, {(0, 1)}, {0: 0, 1: 1}, Sequent((), ()))
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "crosses" in reason


def test_verify_property_1_root_contains_target():
    g = graph_of("q |- r", target=parse_sequent("|- p"))
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 1" in reason


def test_verify_property_2_successor_witness():
    g = graph_of("|- p -> q, q")
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 2" in reason


def test_verify_property_3_predecessor_witness():
    g = graph_of("p -< q, p |- r")
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 3" in reason


def test_verify_property_4_left_imp_propagates():
    g = graph_of("p -> q, q |- r", "|- r", edges={(0, 1)})
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 4" in reason


def test_verify_property_5_right_excl_propagates():
    # world 0 is checked first, so its unresolved predecessor 1 is reported
    # before the persistence breach at 1 would be
    g = graph_of("q |- p -< q", "|-", edges={(1, 0)})
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 5" in reason


def test_verify_property_6_lhs_persists():
    g = graph_of("q |- r", "|- r", edges={(0, 1)})
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 6" in reason


def test_verify_property_7_rhs_antipersists():
    g = graph_of("|-", "|- r", edges={(0, 1)})
    ok, reason = verify_model_graph(g, 0)
    assert not ok and "property 7" in reason


def test_verify_accepts_sound_handmade_graph():
    # the exclusion at world 1 is blocked (q already left) and witnessed by 0
    g = graph_of("q |- p", "q, q -< p |- p", edges={(0, 1)}, target=parse_sequent("q |- p"))
    ok, reason = verify_model_graph(g, 0)
    assert ok, reason


# --------------------------------------------------------------------- di-tree


def test_is_ditree_rejections():
    def shaped(n, edges):
        worlds = {i: GraphWorld(0, Sequent((), ())) for i in range(n)}
        return ModelGraph(worlds, set(edges), {0: 0}, Sequent((), ()))

    assert is_ditree(shaped(1, {(0, 0)}), 0) == (False, "self-loop at 0")
    assert is_ditree(shaped(2, {(0, 1), (1, 0)}), 0) == (False, "antiparallel edge pair")
    got = is_ditree(shaped(3, {(0, 1)}), 0)
    assert got[0] is False and "undirected edges" in got[1]
    got = is_ditree(shaped(4, {(0, 1), (1, 2), (0, 2)}), 0)
    assert got == (False, "component is not connected")
    assert is_ditree(shaped(3, {(0, 1), (2, 1)}), 0) == (True, "")


# ------------------------------------------------------------ model extraction


def test_graph_to_model_checks_persistence():
    worlds = {
        0: GraphWorld(0, parse_sequent("p |- q")),
        1: GraphWorld(0, parse_sequent("|- q")),
    }
    g = ModelGraph(worlds, {(0, 1)}, {0: 0}, Sequent((), ()))
    with pytest.raises(VerificationError):
        graph_to_model(g, 0)


def test_graph_to_model_valuation_from_lhs_atoms():
    model, root = graph_to_model(graph_of("p, p -> q, q |- r"), 0)
    assert root == 0
    assert model.val[0] == frozenset({"p", "q"})  # arrows never enter the valuation


# ----------------------------------------------------------------- build cache


def canonical(model, world):
    order = {w: i for i, w in enumerate(model.worlds)}
    return (
        tuple(frozenset(model.val[w]) for w in model.worlds),
        tuple(sorted((order[u], order[v]) for u, v in model.given_edges)),
        order[world],
    )


def test_build_cache_reuses_layouts():
    cache = BuildCache()
    first = countermodel(DNP, cache=cache)
    assert len(cache.built) > 0 and len(cache.status) > 0
    hit = countermodel(DNP, cache=cache)
    cold = countermodel(DNP)
    # a cache hit restamps world ids densely; the shape must be unchanged
    assert canonical(hit[0], hit[1]) == canonical(cold[0], cold[1])
    assert falsifies(hit[0], hit[1], DNP)
    assert hit[0].worlds == (0, 1, 2, 3)
    assert first[0].worlds == cold[0].worlds == (3, 4, 5, 6)


def test_build_cache_equivalence_over_corpus():
    cache = BuildCache()
    suite = [
        "|- p | (p -> false)",
        "|- ((p -> false) -> false) -> p",
        "|- (p -> q) | (q -> p)",
        "p -> q |- q | (p -> false)",
        "|- ((p -> q) -> p) -> p",
        "~p |- p -> false",
        "|- (p -< q) -> ((p & r) -< q)",
    ]
    for text in suite:
        seq = parse_sequent(text)
        cached = countermodel(seq, cache=cache)
        twice = countermodel(seq, cache=cache)
        plain = countermodel(seq)
        assert canonical(*cached[:2]) == canonical(*twice[:2]) == canonical(*plain[:2])
        assert falsifies(cached[0], cached[1], seq)


def test_build_cache_trim():
    cache = BuildCache(cap=1, node_cap=1)
    countermodel(LEM, cache=cache)
    assert cache.flushes >= 1
    assert len(cache.status) + len(cache.built) <= 1
    assert len(cache.nodes) <= 1
    # a flushed cache still serves correct results
    model, world, _ = countermodel(LEM, cache=cache)
    assert falsifies(model, world, LEM)


def test_build_cache_node_flush_is_independent():
    # dropping search subtrees must not evict finished layouts
    cache = BuildCache(cap=2_000_000, node_cap=1)
    countermodel(LEM, cache=cache)
    assert cache.flushes >= 1
    assert len(cache.nodes) <= 1
    assert len(cache.built) >= 1
    model, world, _ = countermodel(LEM, cache=cache)
    assert falsifies(model, world, LEM)
