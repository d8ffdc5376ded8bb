"""Emitters for recorded search trees and Kripke models.

`emit(obj, format)` accepts a DerivationNode or a KripkeModel and one of
four formats:

* ``text``: indented tree (derivations) or world/edge listing (models).
* ``json``: fixed schemas, see DERIVATION_SCHEMA and MODEL_SCHEMA.
* ``dot``: Graphviz digraph; model rendering suppresses reflexive edges
  and labels each world with its forcing set.
* ``latex``: bussproofs proof tree with dashed inference lines for
  existential branching; models become a small array environment.

Grouping nodes that hold several transitional attempts have no rule of
their own and are named "Alt" in every format.
"""

from __future__ import annotations

import json

from .formula import Formula
from .prover import EXISTENTIAL, DerivationNode
from .semantics import KripkeModel, model_to_json
from .sequent import BigAnd, sorted_members
from .syntax import print_formula, print_sequent

FORMATS = ("text", "json", "dot", "latex")


def rule_name(node: DerivationNode) -> str:
    return node.rule.value if node.rule is not None else "Alt"


def _extended_str(x) -> str:
    if isinstance(x, Formula):
        return print_formula(x)
    mark = "/\\" if isinstance(x, BigAnd) else "\\/"
    groups = (
        "{" + ", ".join(print_formula(f) for f in sorted(m, key=Formula.sort_key)) + "}"
        for m in sorted_members(x.member_sets)
    )
    return mark + "{" + ", ".join(groups) + "}"


def _side_list(side) -> list:
    plain = sorted((f for f in side if isinstance(f, Formula)), key=Formula.sort_key)
    wrappers = [x for x in side if not isinstance(x, Formula)]
    return [print_formula(f) for f in plain] + [_extended_str(w) for w in wrappers]


def _var_list(sets) -> list:
    return [
        [print_formula(f) for f in sorted(m, key=Formula.sort_key)]
        for m in sorted_members(sets)
    ]


def _sets_str(sets) -> str:
    groups = (
        "{" + ", ".join(print_formula(f) for f in sorted(m, key=Formula.sort_key)) + "}"
        for m in sorted_members(sets)
    )
    return "{" + ", ".join(groups) + "}"


def _vars_suffix(node) -> str:
    s, p = node.vars
    if not s and not p:
        return ""
    return f"  S={_sets_str(s)} P={_sets_str(p)}"


# --- JSON ---------------------------------------------------------------

MODEL_SCHEMA = {
    "type": "object",
    "required": ["worlds", "edges"],
    "additionalProperties": False,
    "properties": {
        "worlds": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "atoms"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer"},
                    "atoms": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "integer"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}

DERIVATION_SCHEMA = {
    "$defs": {
        "node": {
            "type": "object",
            "required": [
                "rule",
                "branching",
                "sequent",
                "svar",
                "pvar",
                "status",
                "premises",
            ],
            "additionalProperties": False,
            "properties": {
                "rule": {"type": "string"},
                "branching": {"enum": ["universal", "existential", "leaf"]},
                "sequent": {
                    "type": "object",
                    "required": ["lhs", "rhs"],
                    "additionalProperties": False,
                    "properties": {
                        "lhs": {"type": "array", "items": {"type": "string"}},
                        "rhs": {"type": "array", "items": {"type": "string"}},
                    },
                },
                "svar": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "string"}},
                },
                "pvar": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "string"}},
                },
                "status": {"enum": ["derivable", "open"]},
                "premises": {"type": "array", "items": {"$ref": "#/$defs/node"}},
            },
        }
    },
    "$ref": "#/$defs/node",
}


def derivation_to_dict(node: DerivationNode) -> dict:
    return {
        "rule": rule_name(node),
        "branching": node.branching,
        "sequent": {
            "lhs": _side_list(node.sequent.lhs),
            "rhs": _side_list(node.sequent.rhs),
        },
        "svar": _var_list(node.vars.lhs_sets),
        "pvar": _var_list(node.vars.rhs_sets),
        "status": node.status,
        "premises": [derivation_to_dict(p) for p in node.premises],
    }


# --- text ----------------------------------------------------------------


def _text_lines(node: DerivationNode, depth: int, out: list):
    line = f"{'  ' * depth}{rule_name(node)} [{node.status}]  {print_sequent(node.sequent)}"
    line += _vars_suffix(node)
    if (
        node.status == "open"
        and node.branching == EXISTENTIAL
        and node.rule is not None
        and node.right_created is False
    ):
        # the variable hand-off could not build a right premise
        line += "  (no right premise)"
    out.append(line)
    for p in node.premises:
        _text_lines(p, depth + 1, out)


def _model_text(model: KripkeModel) -> str:
    out = []
    for w in model.worlds:
        atoms = ", ".join(sorted(model.val[w]))
        out.append(f"world {w}: {{{atoms}}}")
    skeleton = [e for e in model.given_edges if e[0] != e[1]]
    if skeleton:
        out.append("edges: " + ", ".join(f"{a} -> {b}" for a, b in skeleton))
    else:
        out.append("edges: none")
    return "\n".join(out)


# --- dot -----------------------------------------------------------------


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _model_dot(model: KripkeModel) -> str:
    # reflexive edges are implied by the frame and only clutter the picture
    out = ["digraph model {", '  node [shape=ellipse, fontname="monospace"];']
    for w in model.worlds:
        atoms = ", ".join(sorted(model.val[w]))
        label = _dot_escape(f"w{w}") + "\\n" + _dot_escape(f"{{{atoms}}}")
        out.append(f'  w{w} [label="{label}"];')
    for a, b in model.given_edges:
        if a != b:
            out.append(f"  w{a} -> w{b};")
    out.append("}")
    return "\n".join(out)


def _derivation_dot(root: DerivationNode) -> str:
    out = ["digraph derivation {", '  node [shape=box, fontname="monospace"];']
    ids = {}
    for i, node in enumerate(root.walk()):
        ids[id(node)] = i
        lines = [f"{rule_name(node)} [{node.status}]", print_sequent(node.sequent)]
        suffix = _vars_suffix(node)
        if suffix:
            lines.append(suffix.strip())
        label = "\\n".join(_dot_escape(part) for part in lines)
        color = " color=red" if node.status == "open" else ""
        out.append(f'  n{i} [label="{label}"{color}];')
    for node in root.walk():
        style = " [style=dashed]" if node.branching == EXISTENTIAL else ""
        for p in node.premises:
            out.append(f"  n{ids[id(node)]} -> n{ids[id(p)]}{style};")
    out.append("}")
    return "\n".join(out)


# --- latex ---------------------------------------------------------------

_LATEX_PREC = {0: 9, 1: 9, 2: 9, 3: 3, 4: 2, 5: 1, 6: 1}


def _latex_formula(f: Formula) -> str:
    # mirrors the ASCII printer's parenthesization
    r = f.rank
    if r == 2:
        return f.name.replace("_", "\\_")
    if r == 0:
        return "\\top"
    if r == 1:
        return "\\bot"
    ls = _latex_formula(f.left)
    rs = _latex_formula(f.right)
    lp = _LATEX_PREC[f.left.rank]
    rp = _LATEX_PREC[f.right.rank]
    if r == 3:
        if lp < 3:
            ls = f"({ls})"
        if rp <= 3:
            rs = f"({rs})"
        return f"{ls} \\land {rs}"
    if r == 4:
        if lp < 2:
            ls = f"({ls})"
        if rp <= 2:
            rs = f"({rs})"
        return f"{ls} \\lor {rs}"
    if r == 5:
        if lp <= 1:
            ls = f"({ls})"
        if f.right.rank == 6:
            rs = f"({rs})"
        return f"{ls} \\to {rs}"
    if lp == 1 and f.left.rank == 5:
        ls = f"({ls})"
    if rp <= 1:
        rs = f"({rs})"
    return f"{ls} \\prec {rs}"


def _latex_sets(sets) -> str:
    groups = (
        "\\{" + ", ".join(_latex_formula(f) for f in sorted(m, key=Formula.sort_key)) + "\\}"
        for m in sorted_members(sets)
    )
    return "\\{" + ", ".join(groups) + "\\}"


def _latex_side(side) -> str:
    plain = sorted((f for f in side if isinstance(f, Formula)), key=Formula.sort_key)
    parts = [_latex_formula(f) for f in plain]
    for w in side:
        if isinstance(w, Formula):
            continue
        mark = "\\bigwedge" if isinstance(w, BigAnd) else "\\bigvee"
        parts.append(mark + _latex_sets(w.member_sets))
    return ", ".join(parts)


def _latex_sequent(node: DerivationNode) -> str:
    seq = node.sequent
    body = f"{_latex_side(seq.lhs)} \\vdash {_latex_side(seq.rhs)}".strip()
    s, p = node.vars
    if s or p:
        body += f"\\;[S{{=}}{_latex_sets(s)},\\,P{{=}}{_latex_sets(p)}]"
    return body

_INF = {
    1: "\\UnaryInfC",
    2: "\\BinaryInfC",
    3: "\\TrinaryInfC",
    4: "\\QuaternaryInfC",
    5: "\\QuinaryInfC",
}


def _latex_node(node: DerivationNode, out: list):
    for p in node.premises:
        _latex_node(p, out)
    concl = "{$" + _latex_sequent(node) + "$}"
    n = len(node.premises)
    if n == 0:
        out.append("\\AxiomC{}")
        n = 1
    # bussproofs inferences take at most five premises; fold the surplus
    # through unlabeled intermediate lines (each pops 5, pushes 1)
    while n > 5:
        out.append("\\QuinaryInfC" + concl)
        n -= 4
    if node.branching == EXISTENTIAL:
        out.append("\\dashedLine")
    out.append(f"\\RightLabel{{\\small {rule_name(node)}}}")
    out.append(_INF[n] + concl)


def _derivation_latex(root: DerivationNode) -> str:
    out = ["\\begin{prooftree}"]
    _latex_node(root, out)
    out.append("\\end{prooftree}")
    return "\n".join(out)


def _model_latex(model: KripkeModel) -> str:
    rows = []
    for w in model.worlds:
        atoms = ", ".join(a.replace("_", "\\_") for a in sorted(model.val[w]))
        rows.append(f"w_{{{w}}} & \\{{{atoms}\\}} \\\\")
    skeleton = [e for e in model.given_edges if e[0] != e[1]]
    edges = ", ".join(f"w_{{{a}}} \\to w_{{{b}}}" for a, b in skeleton) or "\\emptyset"
    return "\n".join(
        ["\\[", "\\begin{array}{ll}"]
        + rows
        + ["\\end{array}", f"\\qquad R = {edges}", "\\]"]
    )


# --- dispatch ------------------------------------------------------------


def emit(obj, format: str = "text") -> str:
    """Serialize a derivation tree or model in the requested format."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    if isinstance(obj, KripkeModel):
        if format == "json":
            return model_to_json(obj)
        if format == "dot":
            return _model_dot(obj)
        if format == "latex":
            return _model_latex(obj)
        return _model_text(obj)
    if isinstance(obj, DerivationNode):
        if format == "json":
            return json.dumps(derivation_to_dict(obj), indent=2)
        if format == "dot":
            return _derivation_dot(obj)
        if format == "latex":
            return _derivation_latex(obj)
        out = []
        _text_lines(obj, 0, out)
        return "\n".join(out)
    raise TypeError(f"cannot emit {type(obj).__name__}")
