"""Concrete syntax: tokenizer, recursive-descent parsers and printers.

Precedence, loosest first: quantifiers and contexts (extend to the right),
``<->``, ``->`` (right associative), ``|``, ``&``, ``U``/``S`` (right
associative), then prefix operators ``! X Y F G O H``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import (
    TRUE_PROP, AtomAt, Exists, Forall, InContext, Next, Not, Or, PNext, PNot,
    POr, Prop, PSince, PUntil, PYesterday, Since, Top, Until, Yesterday,
    And, F as HF, G as HG, H as HH, O as HO, Iff, Implies, pF, pG, pH, pO,
    pand, piff, pimplies, ptrue, true_at,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{msg}{where}")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<op><->|->|[!|&()\[\],.@<>~=+*])
  | (?P<ident>\#\([A-Za-z0-9_']+\)|[A-Za-z0-9_$'\#]+)
    """,
    re.VERBOSE,
)

KEYWORDS = {"X", "Y", "F", "G", "O", "H", "U", "S", "E", "A", "true", "false"}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("op", "ident"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise FormulaSyntaxError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what="identifier") -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def finish(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")


class _PltlParser(_Parser):
    def formula(self):
        return self.iff()

    def iff(self):
        left = self.implies()
        if self.accept("<->"):
            return piff(left, self.iff())
        return left

    def implies(self):
        left = self.disj()
        if self.accept("->"):
            return pimplies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.accept("|"):
            left = POr(left, self.conj())
        return left

    def conj(self):
        left = self.binary()
        while self.accept("&"):
            left = pand(left, self.binary())
        return left

    def binary(self):
        left = self.unary()
        if self.accept("U"):
            return PUntil(left, self.binary())
        if self.accept("S"):
            return PSince(left, self.binary())
        return left

    def unary(self):
        t = self.tok.text
        if self.tok.kind == "op" and t in ("!", "~"):
            self.i += 1
            return PNot(self.unary())
        if self.tok.kind == "ident":
            unary = {"X": PNext, "Y": PYesterday, "F": pF, "G": pG, "O": pO, "H": pH}
            if t in unary:
                self.i += 1
                return unary[t](self.unary())
            if t == "true":
                self.i += 1
                return ptrue()
            if t == "false":
                self.i += 1
                return PNot(ptrue())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        return Prop(self.ident("proposition"))


class _HyperParser(_PltlParser):
    def hformula(self):
        return self.h_iff()

    def h_iff(self):
        left = self.h_implies()
        if self.accept("<->"):
            return Iff(left, self.h_iff())
        return left

    def h_implies(self):
        left = self.h_disj()
        if self.accept("->"):
            return Implies(left, self.h_implies())
        return left

    def h_disj(self):
        left = self.h_conj()
        while self.accept("|"):
            left = Or(left, self.h_conj())
        return left

    def h_conj(self):
        left = self.h_binary()
        while self.accept("&"):
            left = And(left, self.h_binary())
        return left

    def label(self):
        if not self.accept("["):
            return frozenset()
        items = []
        if not self.at("]"):
            items.append(self.formula())
            while self.accept(","):
                items.append(self.formula())
        self.expect("]")
        return frozenset(items)

    def h_binary(self):
        left = self.h_unary()
        if self.tok.kind == "ident" and self.tok.text in ("U", "S"):
            op = self.tok.text
            self.i += 1
            gamma = self.label()
            right = self.h_binary()
            return Until(gamma, left, right) if op == "U" else Since(gamma, left, right)
        return left

    def h_unary(self):
        tok = self.tok
        t = tok.text
        if tok.kind == "op" and t in ("!", "~"):
            self.i += 1
            return Not(self.h_unary())
        if tok.kind == "op" and t == "<":
            self.i += 1
            vs = []
            if not self.at(">"):
                vs.append(self.ident("trace variable"))
                while self.accept(","):
                    vs.append(self.ident("trace variable"))
            if not vs:
                self.error("empty context set", tok)
            self.expect(">")
            return InContext(frozenset(vs), self.hformula())
        if tok.kind == "ident":
            if t in ("E", "A") and self.peek().kind == "ident":
                self.i += 1
                var = self.ident("trace variable")
                self.expect(".")
                body = self.hformula()
                return Exists(var, body) if t == "E" else Forall(var, body)
            temporal = {"X": Next, "Y": Yesterday}
            derived = {"F": HF, "G": HG, "O": HO, "H": HH}
            if t in temporal:
                self.i += 1
                gamma = self.label()
                return temporal[t](gamma, self.h_unary())
            if t in derived:
                self.i += 1
                gamma = self.label()
                return derived[t](self.h_unary(), gamma)
            if t in ("true", "false"):
                self.i += 1
                if self.accept("@"):
                    f = true_at(self.ident("trace variable"))
                else:
                    f = Top()
                return f if t == "true" else Not(f)
        if self.accept("("):
            f = self.hformula()
            self.expect(")")
            return f
        prop = self.ident("proposition")
        self.expect("@")
        return AtomAt(prop, self.ident("trace variable"))


def parse_pltl(text: str):
    p = _PltlParser(text)
    f = p.formula()
    p.finish()
    return f


def parse_hyper(text: str):
    p = _HyperParser(text)
    f = p.hformula()
    p.finish()
    return f


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------


def _match_and(f, neg, disj):
    """Recognise ``!( !a | !b )`` and return ``(a, b)``."""
    if isinstance(f, neg) and isinstance(f.arg, disj):
        l, r = f.arg.left, f.arg.right
        if isinstance(l, neg) and isinstance(r, neg):
            return l.arg, r.arg
    return None


def _is_ptrue(f) -> bool:
    return f == ptrue()


def print_pltl(f) -> str:
    return _pp(f)


def _pp_operand(f) -> str:
    s = _pp(f)
    return s if _p_atomic(f) else f"({s})"


def _p_atomic(f) -> bool:
    if isinstance(f, Prop) or _is_ptrue(f):
        return True
    if _match_and(f, PNot, POr):
        return False
    if isinstance(f, PNot) and isinstance(f.arg, PUntil) and _is_ptrue(f.arg.left) \
            and isinstance(f.arg.right, PNot):
        return _p_atomic(f.arg.right.arg)
    if isinstance(f, PNot) and isinstance(f.arg, PSince) and _is_ptrue(f.arg.left) \
            and isinstance(f.arg.right, PNot):
        return _p_atomic(f.arg.right.arg)
    if isinstance(f, (PUntil, PSince)) and _is_ptrue(f.left):
        return _p_atomic(f.right)
    if isinstance(f, (PNot, PNext, PYesterday)):
        return _p_atomic(f.arg)
    return False


def _pp(f) -> str:
    if isinstance(f, Prop):
        return f.name
    if _is_ptrue(f):
        return "true"
    ab = _match_and(f, PNot, POr)
    if ab:
        return f"{_pp_operand(ab[0])} & {_pp_operand(ab[1])}"
    if isinstance(f, PNot):
        g = f.arg
        if isinstance(g, PUntil) and _is_ptrue(g.left) and isinstance(g.right, PNot):
            return f"G {_pp_operand(g.right.arg)}"
        if isinstance(g, PSince) and _is_ptrue(g.left) and isinstance(g.right, PNot):
            return f"H {_pp_operand(g.right.arg)}"
        return f"!{_pp_operand(g)}"
    if isinstance(f, POr):
        return f"{_pp_operand(f.left)} | {_pp_operand(f.right)}"
    if isinstance(f, PNext):
        return f"X {_pp_operand(f.arg)}"
    if isinstance(f, PYesterday):
        return f"Y {_pp_operand(f.arg)}"
    if isinstance(f, PUntil):
        if _is_ptrue(f.left):
            return f"F {_pp_operand(f.right)}"
        return f"{_pp_operand(f.left)} U {_pp_operand(f.right)}"
    if isinstance(f, PSince):
        if _is_ptrue(f.left):
            return f"O {_pp_operand(f.right)}"
        return f"{_pp_operand(f.left)} S {_pp_operand(f.right)}"
    raise TypeError(f"not a PLTL formula: {f!r}")


def print_label(gamma) -> str:
    if not gamma:
        return ""
    return "[" + ",".join(sorted(print_pltl(g) for g in gamma)) + "]"


def _is_true_at(f):
    if isinstance(f, Or) and isinstance(f.left, AtomAt) and f.left.prop == TRUE_PROP \
            and f.right == Not(f.left):
        return f.left.var
    return None


def _h_atomic(f) -> bool:
    if isinstance(f, (AtomAt, Top)) or _is_true_at(f):
        return True
    if _match_and(f, Not, Or):
        return False
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, (Until, Since)) and isinstance(g.left, Top) and isinstance(g.right, Not):
            return _h_atomic(g.right.arg)
        return _h_atomic(g)
    if isinstance(f, (Until, Since)) and isinstance(f.left, Top):
        return _h_atomic(f.right)
    if isinstance(f, (Next, Yesterday)):
        return _h_atomic(f.arg)
    return False


def _hp_operand(f) -> str:
    s = print_hyper(f)
    return s if _h_atomic(f) else f"({s})"


def _ctx(vs) -> str:
    return "<" + ",".join(sorted(vs)) + ">"


def print_hyper(f) -> str:
    if isinstance(f, AtomAt):
        return f"{f.prop}@{f.var}"
    if isinstance(f, Top):
        return "true"
    v = _is_true_at(f)
    if v:
        return f"true@{v}"
    ab = _match_and(f, Not, Or)
    if ab:
        return f"{_hp_operand(ab[0])} & {_hp_operand(ab[1])}"
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, Until) and isinstance(g.left, Top) and isinstance(g.right, Not):
            return f"G{print_label(g.gamma)} {_hp_operand(g.right.arg)}"
        if isinstance(g, Since) and isinstance(g.left, Top) and isinstance(g.right, Not):
            return f"H{print_label(g.gamma)} {_hp_operand(g.right.arg)}"
        return f"!{_hp_operand(g)}"
    if isinstance(f, Or):
        return f"{_hp_operand(f.left)} | {_hp_operand(f.right)}"
    if isinstance(f, InContext):
        return f"{_ctx(f.vars)} {print_hyper(f.arg)}"
    if isinstance(f, Next):
        return f"X{print_label(f.gamma)} {_hp_operand(f.arg)}"
    if isinstance(f, Yesterday):
        return f"Y{print_label(f.gamma)} {_hp_operand(f.arg)}"
    if isinstance(f, Until):
        if isinstance(f.left, Top):
            return f"F{print_label(f.gamma)} {_hp_operand(f.right)}"
        return f"{_hp_operand(f.left)} U{print_label(f.gamma)} {_hp_operand(f.right)}"
    if isinstance(f, Since):
        if isinstance(f.left, Top):
            return f"O{print_label(f.gamma)} {_hp_operand(f.right)}"
        return f"{_hp_operand(f.left)} S{print_label(f.gamma)} {_hp_operand(f.right)}"
    if isinstance(f, Exists):
        return f"E {f.var}. {print_hyper(f.arg)}"
    if isinstance(f, Forall):
        return f"A {f.var}. {print_hyper(f.arg)}"
    raise TypeError(f"not a hyper formula: {f!r}")
