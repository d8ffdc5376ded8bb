"""Terminating prover and countermodel generator for bi-intuitionistic logic."""

from .formula import (
    TOP,
    BOT,
    And,
    Atom,
    Bot,
    Excl,
    Formula,
    Imp,
    Or,
    Top,
    count_formulas,
    desugar,
    dual,
    enumerate_formulas,
    subformulae,
)
from .syntax import (
    ParseError,
    parse,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
)
from .sequent import BigAnd, BigOr, RuleId, Sequent, VarSets
from .prover import (
    BudgetExceededError,
    DerivationNode,
    ProofResult,
    prove,
    prove_formula,
)
from .semantics import KripkeModel, bounded_countermodel, falsifies, forces
from .countermodel import ModelGraph, countermodel, graph_to_model, verify_model_graph

__all__ = [
    "TOP",
    "BOT",
    "And",
    "Atom",
    "Bot",
    "Excl",
    "Formula",
    "Imp",
    "Or",
    "Top",
    "count_formulas",
    "desugar",
    "dual",
    "enumerate_formulas",
    "subformulae",
    "ParseError",
    "parse",
    "parse_formula",
    "parse_sequent",
    "print_formula",
    "print_sequent",
    "BigAnd",
    "BigOr",
    "RuleId",
    "Sequent",
    "VarSets",
    "BudgetExceededError",
    "DerivationNode",
    "ProofResult",
    "prove",
    "prove_formula",
    "KripkeModel",
    "bounded_countermodel",
    "falsifies",
    "forces",
    "ModelGraph",
    "countermodel",
    "graph_to_model",
    "verify_model_graph",
]
