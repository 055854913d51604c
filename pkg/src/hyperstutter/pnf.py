"""Prenex normal form via position traces.

The rewriter pulls quantifiers out of temporal operators by making the
implicit position quantification of until/since explicit: fresh variables
range over the traces ``{}^i {#} {}^omega`` and mark the i-th successor.

Before rewriting, every temporal node is wrapped in an explicit context
holding exactly the variables that are both in its effective context and
bound above it. The wrapper is semantically neutral, and it keeps pulled
quantifiers from moving (or blocking predecessors) where they were not
originally in scope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count
from typing import Optional

from .logic import (
    TEMPORAL, AtomAt, Exists, Forall, Hyper, InContext, Next, Not, Or, Since,
    Top, Until, Yesterday, And, F, G, O, Implies, Universal, all_vars,
    children, is_prenex, is_quantifier_free, is_sentence, replace_children, rename_free, true_at,
)
from .traces import POS_PROP, TraceSet, position_trace

ORI, POS = "ori", "pos"


@dataclass(frozen=True)
class KindQuant(Hyper):
    """Quantifier relativized to original traces (ori) or position traces (pos)."""
    q: str
    var: str
    kind: str
    arg: Hyper


def mark(x: str) -> Hyper:
    return AtomAt(POS_PROP, x)


def guard(x: str, kind: str) -> Hyper:
    body = F(mark(x)) if kind == POS else G(Not(mark(x)))
    return InContext(frozenset({x}), body)


def relativize(q: str, x: str, kind: str, body: Hyper) -> Hyper:
    g = guard(x, kind)
    if q == "E":
        return Exists(x, And(g, body))
    return Forall(x, Implies(g, body))


def alpha_pos(ap, x="x", x2="x'") -> Hyper:
    """Axiomatisation of the position traces over propositions ``ap``."""
    h, hp = mark(x), mark(x2)
    no_props = [Not(AtomAt(p, x)) for p in sorted(ap)]
    body = U(Not(h), And(h, Next(frozenset(), G(Not(h)))))
    if no_props:
        nothing = no_props[0]
        for n in no_props[1:]:
            nothing = And(nothing, n)
        body = And(body, G(nothing))
    unique = Forall(x, Implies(F(h), body))
    base = Exists(x, h)
    closure = Forall(x, Exists(x2, Implies(F(h), F(And(h, Next(frozenset(), hp))))))
    return And(And(unique, base), closure)


def U(a, b, gamma=frozenset()):
    return Until(frozenset(gamma), a, b)


def lpos_bounded(n: int) -> TraceSet:
    return TraceSet([(f"pos{i}", position_trace(i)) for i in range(n + 1)])


# --------------------------------------------------------------------------
# Rewriting machinery
# --------------------------------------------------------------------------


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = count(1)

    def __call__(self, stem: str) -> str:
        while True:
            name = f"_{stem}{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _ctx(vars_: frozenset, dummy: str) -> frozenset:
    return vars_ if vars_ else frozenset({dummy})


def scope_contexts(f: Hyper, ctx, scope: frozenset, dummy: str) -> Hyper:
    """Wrap each temporal node in ``<effective context & bound vars>``."""
    if isinstance(f, InContext):
        return InContext(f.vars, scope_contexts(f.arg, f.vars, scope, dummy))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, scope_contexts(f.arg, ctx, scope | {f.var}, dummy))
    if isinstance(f, KindQuant):
        return KindQuant(f.q, f.var, f.kind, scope_contexts(f.arg, ctx, scope | {f.var}, dummy))
    kids = tuple(scope_contexts(k, ctx, scope, dummy) for k in children(f))
    g = replace_children(f, kids) if kids else f
    if isinstance(f, TEMPORAL):
        eff = scope if ctx is None or isinstance(ctx, Universal) else frozenset(ctx) & scope
        return InContext(_ctx(eff, dummy), g)
    return g


def rename_apart(f: Hyper, fresh: _Fresh, used: Optional[set] = None) -> Hyper:
    """Give every quantifier a distinct variable."""
    used = set() if used is None else used
    if isinstance(f, (Exists, Forall)):
        x = f.var
        body = f.arg
        if x in used:
            y = fresh(x.lstrip("_") or "v")
            body = rename_free(body, x, y)
            x = y
        used.add(x)
        return type(f)(x, rename_apart(body, fresh, used))
    kids = children(f)
    if not kids:
        return f
    return replace_children(f, tuple(rename_apart(k, fresh, used) for k in kids))


def _flip(q: str) -> str:
    return "A" if q == "E" else "E"


def _rebuild(prefix, matrix) -> Hyper:
    for q, x, k in reversed(prefix):
        matrix = KindQuant(q, x, k, matrix)
    return matrix


class _Rewriter:
    def __init__(self, fresh: _Fresh, dummy: str, literal: bool = False):
        self.fresh = fresh
        self.dummy = dummy
        self.literal = literal
        self.introduced: list[str] = []
        self.rules: list[str] = []

    def c(self, s) -> frozenset:
        return _ctx(frozenset(s), self.dummy)

    def pair(self):
        xi, xj = self.fresh("i"), self.fresh("j")
        self.introduced += [xi, xj]
        return xi, xj

    def order(self, xi, xj) -> Hyper:
        """Position of ``xi`` strictly above that of ``xj``."""
        return InContext(frozenset({xi, xj}), F(And(mark(xj), Next(frozenset(), F(mark(xi))))))

    def on_grid(self, v, gamma) -> Hyper:
        """The marked position of ``v`` is a change point for ``gamma``.

        Only such positions are counted by the stutter steps; labels with
        past operators can skip positions even on marker-only traces.
        """
        return InContext(frozenset({v}), F(mark(v), gamma))

    def not_initial(self, v) -> Hyper:
        return InContext(frozenset({v}), Not(Yesterday(frozenset(), true_at(v))))

    # Each rule takes the node with its already-prenexed children and
    # returns a formula headed by KindQuant nodes.

    def rule(self, f, C, pa, ma, pb=None, mb=None) -> Hyper:
        C = frozenset(C)
        if isinstance(f, Not):
            self.rules.append("not")
            return _rebuild([(_flip(q), x, k) for q, x, k in pa], Not(ma))
        if isinstance(f, Or):
            self.rules.append("or")
            if pa:
                q, x, k = pa[0]
                return KindQuant(q, x, k, Or(_rebuild(pa[1:], ma), _rebuild(pb, mb)))
            q, x, k = pb[0]
            return KindQuant(q, x, k, Or(ma, _rebuild(pb[1:], mb)))
        if isinstance(f, InContext):
            self.rules.append("context")
            q, x, k = pa[0]
            return KindQuant(q, x, k, InContext(f.vars, _rebuild(pa[1:], ma)))
        if isinstance(f, (Next, Yesterday)):
            self.rules.append("next" if isinstance(f, Next) else "yesterday")
            q, x, k = pa[0]
            inner = InContext(self.c(C), _rebuild(pa[1:], ma))
            return KindQuant(q, x, k, InContext(self.c(C - {x}), type(f)(f.gamma, inner)))
        if isinstance(f, (Until, Since)):
            left_first = bool(pa)
            if left_first:
                q, x, k = pa[0]
                psi1, psi2 = _rebuild(pa[1:], ma), _rebuild(pb, mb)
            else:
                q, x, k = pb[0]
                psi1, psi2 = _rebuild(pa, ma), _rebuild(pb[1:], mb)
            xi, xj = self.pair()
            if isinstance(f, Until):
                self.rules.append("until-left" if left_first else "until-right")
                reach_i = InContext(self.c((C | {xi}) - {x}),
                                    F(And(mark(xi), InContext(self.c(C), psi2)), f.gamma))
                reach_j = InContext(self.c((C | {xj}) - {x}),
                                    F(And(mark(xj), InContext(self.c(C), psi1)), f.gamma))
            else:
                self.rules.append("since-left" if left_first else "since-right")
                back_i = InContext(self.c((C | {xi}) - {x}),
                                   O(And(self.not_initial(xi), InContext(self.c(C), psi2)), f.gamma))
                back_j = InContext(self.c((C | {xj}) - {x}),
                                   O(And(self.not_initial(xj), InContext(self.c(C), psi1)), f.gamma))
                reach_i = InContext(frozenset({xi}), F(And(mark(xi), back_i)))
                reach_j = InContext(frozenset({xj}), F(And(mark(xj), back_j)))
            premise = self.order(xi, xj)
            if not self.literal:
                premise = And(premise, self.on_grid(xj, f.gamma))
                if isinstance(f, Since):
                    reach_i = And(reach_i, self.on_grid(xi, f.gamma))
            body = And(reach_i, Implies(premise, reach_j))
            if left_first:
                return KindQuant("E", xi, POS, KindQuant("A", xj, POS, KindQuant(q, x, k, body)))
            return KindQuant("E", xi, POS, KindQuant(q, x, k, KindQuant("A", xj, POS, body)))
        raise TypeError(f"no rule for {type(f).__name__}")

    def pnf(self, f: Hyper, C) -> tuple[list, Hyper]:
        if isinstance(f, (Exists, Forall)):
            p, m = self.pnf(f.arg, C)
            return [("E" if isinstance(f, Exists) else "A", f.var, ORI)] + p, m
        if isinstance(f, KindQuant):
            p, m = self.pnf(f.arg, C)
            return [(f.q, f.var, f.kind)] + p, m
        if isinstance(f, (AtomAt, Top)):
            return [], f
        if isinstance(f, InContext):
            p, m = self.pnf(f.arg, f.vars)
            if not p:
                return [], InContext(f.vars, m)
            return self.pnf(self.rule(f, C, p, m), C)
        if isinstance(f, (Not, Next, Yesterday)):
            p, m = self.pnf(f.arg, C)
            if not p:
                return [], replace_children(f, (m,))
            if isinstance(f, Not):
                return [(_flip(q), x, k) for q, x, k in p], Not(m)
            return self.pnf(self.rule(f, C, p, m), C)
        if isinstance(f, (Or, Until, Since)):
            pa, ma = self.pnf(f.left, C)
            pb, mb = self.pnf(f.right, C)
            if not pa and not pb:
                return [], replace_children(f, (ma, mb))
            if isinstance(f, Or):
                return pa + pb, Or(ma, mb)
            return self.pnf(self.rule(f, C, pa, ma, pb, mb), C)
        raise TypeError(f"not a hyper formula: {f!r}")


def assemble(prefix, matrix) -> Hyper:
    """Prenex formula with the relativization guards folded into the matrix."""
    for q, x, k in reversed(prefix):
        g = guard(x, k)
        matrix = And(g, matrix) if q == "E" else Implies(g, matrix)
    for q, x, _ in reversed(prefix):
        matrix = Exists(x, matrix) if q == "E" else Forall(x, matrix)
    return matrix


def expand_kinds(f: Hyper) -> Hyper:
    """Replace KindQuant nodes by guarded ordinary quantifiers (in place)."""
    if isinstance(f, KindQuant):
        return relativize(f.q, f.var, f.kind, expand_kinds(f.arg))
    kids = children(f)
    if not kids:
        return f
    return replace_children(f, tuple(expand_kinds(k) for k in kids))


@dataclass
class PnfResult:
    formula: Hyper
    prefix: list
    fresh_vars: list
    uses_hash: bool
    rules: list = field(default_factory=list)

    def fresh_map(self) -> dict:
        return {x: k for _, x, k in self.prefix if x in self.fresh_vars}


def to_pnf(sentence: Hyper, literal: bool = False) -> PnfResult:
    """Prenex form; ``literal`` drops the change-point restriction on position variables."""
    if not is_sentence(sentence):
        raise ValueError("prenex conversion needs a sentence")
    fresh = _Fresh(all_vars(sentence) | {POS_PROP})
    dummy = fresh("v")
    f = rename_apart(sentence, fresh)
    f = scope_contexts(f, None, frozenset(), dummy)
    rw = _Rewriter(fresh, dummy, literal)
    prefix, matrix = rw.pnf(f, frozenset({dummy}))
    out = assemble(prefix, matrix)
    assert is_prenex(out)
    return PnfResult(out, prefix, rw.introduced, bool(prefix), rw.rules)


def rewrite_once(f: Hyper, ctx, dom=frozenset(), literal: bool = False) -> Hyper:
    """Apply the single rule matching the top of ``f``.

    ``ctx`` is the context ``f`` is evaluated in and ``dom`` the domain of
    the assignment; the result is to be evaluated over the same assignment
    and context, on a model extended by position traces.
    """
    fresh = _Fresh(all_vars(f) | set(dom) | {POS_PROP})
    dummy = fresh("v")
    f = scope_contexts(f, ctx, frozenset(dom), dummy)
    wrapper = None
    if isinstance(f, InContext) and isinstance(f.arg, TEMPORAL):
        wrapper, f = f.vars, f.arg
    rw = _Rewriter(fresh, dummy, literal)
    C = wrapper if wrapper is not None else frozenset({dummy})

    def head(g):
        if isinstance(g, (Exists, Forall)):
            return [("E" if isinstance(g, Exists) else "A", g.var, ORI)], g.arg
        return [], g

    kids = children(f)
    if isinstance(f, (Or, Until, Since)):
        pa, ma = head(kids[0])
        pb, mb = head(kids[1])
        out = rw.rule(f, C, pa, ma, pb, mb)
    else:
        pa, ma = head(kids[0])
        if not pa:
            raise ValueError("no quantifier to pull")
        out = rw.rule(f, C, pa, ma)
    out = expand_kinds(out)
    return InContext(wrapper, out) if wrapper is not None else out


# --------------------------------------------------------------------------
# Verification against bounded position traces
# --------------------------------------------------------------------------


@dataclass
class PnfVerdict:
    lhs: bool
    rhs: bool
    bound: int
    inconclusive: bool

    @property
    def agree(self) -> bool:
        return self.lhs == self.rhs


def verify_pnf(sentence: Hyper, l: TraceSet, n: int = 32, max_n: int = 128,
               result: Optional[PnfResult] = None, literal: bool = False) -> PnfVerdict:
    from .hyper import check_traceset

    for t in l.values():
        if POS_PROP in t.props():
            raise ValueError("model traces must not carry the position marker")
    lhs = check_traceset(l, sentence)
    phi = (result or to_pnf(sentence, literal)).formula
    while True:
        rhs = check_traceset(l.union(lpos_bounded(n)), phi)
        if rhs == lhs or n >= max_n:
            return PnfVerdict(lhs, rhs, n, rhs != lhs)
        n = min(2 * n, max_n)


def prenex_boolean(sentence: Hyper) -> Hyper:
    """Pull quantifiers through boolean connectives and contexts only.

    Needs no position traces; fails when a quantifier sits under a temporal
    operator.
    """
    fresh = _Fresh(all_vars(sentence))
    f = rename_apart(sentence, fresh)

    def go(g):
        if isinstance(g, (Exists, Forall)):
            p, m = go(g.arg)
            return [("E" if isinstance(g, Exists) else "A", g.var)] + p, m
        if isinstance(g, Not):
            p, m = go(g.arg)
            return [(_flip(q), x) for q, x in p], Not(m)
        if isinstance(g, Or):
            pa, ma = go(g.left)
            pb, mb = go(g.right)
            return pa + pb, Or(ma, mb)
        if isinstance(g, InContext):
            p, m = go(g.arg)
            return p, InContext(g.vars, m)
        if not is_quantifier_free(g):
            raise ValueError("a quantifier occurs under a temporal operator")
        return [], g

    prefix, matrix = go(f)
    for q, x in reversed(prefix):
        matrix = (Exists if q == "E" else Forall)(x, matrix)
    return matrix
