"""Concrete syntax: tokenizer, parser, and printers.

Formula syntax, loosest-binding first:

    f  :=  g (-> g)*  |  g (-< g)*      arrows may not be mixed unparenthesized
    g  :=  h ('|' h)*                   | is left-associative
    h  :=  u ('&' u)*                   & is left-associative
    u  :=  '!' u  |  '~' u  |  p       negation and co-negation
    p  :=  atom  |  'true'  |  'false'  |  '(' f ')'

`->` associates to the right, `-<` to the left.  Atoms match
[a-z][a-z0-9_]*.  A sequent is two comma-separated formula lists around
`|-`; either side may be empty.

Printing is the inverse of parsing on core formulas: `print_formula`
emits the minimal parenthesization, and parsing its output returns the
same formula.  Negations are not reconstructed; `p -> false` prints as
written, not as `!p`.
"""

from __future__ import annotations

import re

from .formula import Formula, desugar
from .sequent import BigAnd, BigOr, Sequent


class ParseError(ValueError):
    """Raised on any lexical or syntactic error; carries line and column."""

    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


class Surface:
    """Parse-tree node before sugar removal.

    `op` is one of atom, top, bot, not, conot, and, or, imp, excl.  Atoms
    carry `name`; unary nodes use `left`; binary nodes use both sides.
    """

    __slots__ = ("op", "name", "left", "right")

    def __init__(self, op, name=None, left=None, right=None):
        self.op = op
        self.name = name
        self.left = left
        self.right = right

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return (
            self.op == other.op
            and self.name == other.name
            and self.left == other.left
            and self.right == other.right
        )

    def __hash__(self):
        return hash((self.op, self.name, self.left, self.right))

    def __repr__(self):
        if self.op == "atom":
            return f"Surface(atom {self.name})"
        if self.right is None:
            if self.left is None:
                return f"Surface({self.op})"
            return f"Surface({self.op}, {self.left!r})"
        return f"Surface({self.op}, {self.left!r}, {self.right!r})"


_TOKEN_RE = re.compile(
    r"""[ \t\r\n]+
      | (?P<turnstile>\|-)
      | (?P<imp>->)
      | (?P<excl>-<)
      | (?P<and>&)
      | (?P<or>\|)
      | (?P<not>!)
      | (?P<conot>~)
      | (?P<comma>,)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<name>[a-z][a-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    bol = 0  # index just past the last newline
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - bol + 1)
        kind = m.lastgroup
        if kind is not None:
            value = m.group()
            if kind == "name":
                if value == "true":
                    kind = "top"
                elif value == "false":
                    kind = "bot"
            tokens.append((kind, value, line, pos - bol + 1))
        nl = text.count("\n", pos, m.end())
        if nl:
            line += nl
            bol = text.rindex("\n", pos, m.end()) + 1
        pos = m.end()
    tokens.append(("eof", "", line, n - bol + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        kind, value, line, col = tok or self.peek()
        raise ParseError(msg, line, col)

    def formula(self) -> Surface:
        first = self.arrow_arg()
        kind = self.peek()[0]
        if kind not in ("imp", "excl"):
            return first
        parts = [first]
        arrow = kind
        while True:
            tok = self.peek()
            if tok[0] not in ("imp", "excl"):
                break
            if tok[0] != arrow:
                self.fail("cannot mix -> and -< without parentheses", tok)
            self.next()
            parts.append(self.arrow_arg())
        if arrow == "imp":
            out = parts[-1]
            for part in reversed(parts[:-1]):
                out = Surface("imp", left=part, right=out)
        else:
            out = parts[0]
            for part in parts[1:]:
                out = Surface("excl", left=out, right=part)
        return out

    def arrow_arg(self) -> Surface:
        out = self.and_chain()
        while self.peek()[0] == "or":
            self.next()
            out = Surface("or", left=out, right=self.and_chain())
        return out

    def and_chain(self) -> Surface:
        out = self.unary()
        while self.peek()[0] == "and":
            self.next()
            out = Surface("and", left=out, right=self.unary())
        return out

    def unary(self) -> Surface:
        kind = self.peek()[0]
        if kind == "not":
            self.next()
            return Surface("not", left=self.unary())
        if kind == "conot":
            self.next()
            return Surface("conot", left=self.unary())
        return self.primary()

    def primary(self) -> Surface:
        kind, value, line, col = self.next()
        if kind == "name":
            return Surface("atom", name=value)
        if kind == "top":
            return Surface("top")
        if kind == "bot":
            return Surface("bot")
        if kind == "lparen":
            inner = self.formula()
            tok = self.next()
            if tok[0] != "rparen":
                self.fail("expected ')'", tok)
            return inner
        self.fail(f"expected a formula, found {value!r}" if value else "expected a formula", (kind, value, line, col))

    def formula_list(self):
        # stops at |-, eof, or anything a formula cannot start with
        out = []
        if self.peek()[0] in ("turnstile", "eof"):
            return out
        out.append(self.formula())
        while self.peek()[0] == "comma":
            self.next()
            out.append(self.formula())
        return out

    def expect_eof(self):
        tok = self.peek()
        if tok[0] != "eof":
            self.fail(f"unexpected {tok[1]!r}", tok)


def parse_formula(text: str) -> Surface:
    """Parse a formula into its surface tree, keeping negation sugar."""
    p = _Parser(text)
    out = p.formula()
    p.expect_eof()
    return out


def parse(text: str) -> Formula:
    """Parse a formula and desugar it into a core formula."""
    return desugar(parse_formula(text))


def parse_sequent(text: str) -> Sequent:
    """Parse `Γ |- Δ` into a sequent; either side may be empty."""
    p = _Parser(text)
    lhs = p.formula_list()
    tok = p.next()
    if tok[0] != "turnstile":
        p.fail("expected '|-'", tok)
    rhs = p.formula_list()
    p.expect_eof()
    return Sequent(
        frozenset(desugar(f) for f in lhs),
        frozenset(desugar(f) for f in rhs),
    )


_PREC_ARROW = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_LEAF = 9

_PREC = {0: _PREC_LEAF, 1: _PREC_LEAF, 2: _PREC_LEAF, 3: _PREC_AND, 4: _PREC_OR, 5: _PREC_ARROW, 6: _PREC_ARROW}


def _print(f: Formula) -> str:
    r = f.rank
    if r == 2:
        return f.name
    if r == 0:
        return "true"
    if r == 1:
        return "false"
    ls = _print(f.left)
    rs = _print(f.right)
    lp = _PREC[f.left.rank]
    rp = _PREC[f.right.rank]
    if r == 3:
        if lp < _PREC_AND:
            ls = f"({ls})"
        if rp <= _PREC_AND:
            rs = f"({rs})"
        return f"{ls} & {rs}"
    if r == 4:
        if lp < _PREC_OR:
            ls = f"({ls})"
        if rp <= _PREC_OR:
            rs = f"({rs})"
        return f"{ls} | {rs}"
    if r == 5:
        if lp <= _PREC_ARROW:
            ls = f"({ls})"
        if f.right.rank == 6:
            rs = f"({rs})"
        return f"{ls} -> {rs}"
    if lp == _PREC_ARROW and f.left.rank == 5:
        ls = f"({ls})"
    if rp <= _PREC_ARROW:
        rs = f"({rs})"
    return f"{ls} -< {rs}"


def print_formula(f: Formula) -> str:
    """Minimal-parenthesization text for a core formula; parse(print) is identity."""
    return _print(f)


def _sorted(formulas):
    return sorted(formulas, key=lambda f: f.sort_key())


def _print_member_sets(wrapper) -> str:
    groups = []
    for m in sorted(wrapper.member_sets, key=lambda s: sorted(f.sort_key() for f in s)):
        groups.append("{" + ", ".join(_print(f) for f in _sorted(m)) + "}")
    return "{" + ", ".join(groups) + "}"


def _print_side(side) -> str:
    plain = []
    wrappers = []
    for x in side:
        if isinstance(x, Formula):
            plain.append(x)
        else:
            wrappers.append(x)
    parts = [_print(f) for f in _sorted(plain)]
    for w in wrappers:
        mark = "/\\" if isinstance(w, BigAnd) else "\\/"
        parts.append(mark + _print_member_sets(w))
    return ", ".join(parts)


def print_sequent(seq: Sequent) -> str:
    """Canonical text for a sequent; sides are sorted, wrappers print last."""
    lhs = _print_side(seq.lhs)
    rhs = _print_side(seq.rhs)
    if lhs and rhs:
        return f"{lhs} |- {rhs}"
    if lhs:
        return f"{lhs} |-"
    if rhs:
        return f"|- {rhs}"
    return "|-"
