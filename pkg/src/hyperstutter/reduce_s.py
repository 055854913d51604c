"""Compilation of second-order arithmetic into hyperLTL with stuttering only.

Numbers are traces carrying a single ``#(y)`` mark; sets are traces over
``#``. Multiplication builds a periodic helper trace over ``$`` whose
period is pinned down with the help of a second trace over ``$'``.
"""
from __future__ import annotations

from itertools import count
from typing import Iterable, Optional

from .hyper import Model, check_traceset
from .logic import (
    And, AtomAt, Exists, F, Forall, G, Iff, Implies, Not, Or, Prop, U, X, conj, disj,
)
from .report import Report
from .soa import (
    FLAT_ATOMS, Add, Less, Member, Mul, SExists, SForall, SNot, SOr, Soa,
    first_order_vars, is_set_var, separate_repeats, soa_walk,
)
from .traces import EMPTY_LETTER, LassoTrace, PointedTrace, TraceSet, letter, pointwise_union

SET_MARK = "#"
DOLLAR = "$"
DOLLAR_PRIME = "$'"


class ReductionError(ValueError):
    pass


def trace_var(v: str) -> str:
    return f"x_{v}"


def mark(y: str) -> str:
    return f"#({y})"


def alphabet(number_vars: Iterable[str]) -> list:
    return [SET_MARK] + [mark(y) for y in sorted(number_vars)] + [DOLLAR, DOLLAR_PRIME]


def _at(p: str, x: str):
    return AtomAt(p, x)


def _only(x: str, allowed: Iterable[str], ap) -> object:
    """``G`` of the negation of every proposition outside ``allowed`` on ``x``."""
    allowed = set(allowed)
    return G(conj(Not(_at(p, x)) for p in ap if p not in allowed))


def set_guard(x: str, ap) -> object:
    return _only(x, [SET_MARK], ap)


def number_guard(y: str, x: str, ap) -> object:
    m = _at(mark(y), x)
    return And(_only(x, [mark(y)], ap), U(Not(m), And(m, X(G(Not(m))))))


class _Compiler:
    def __init__(self, ap, periodicity_step_label: str):
        self.ap = ap
        self.step = periodicity_step_label
        self.fresh = count(1)

    def __call__(self, f: Soa):
        if isinstance(f, SNot):
            return Not(self(f.arg))
        if isinstance(f, SOr):
            return Or(self(f.left), self(f.right))
        if isinstance(f, (SExists, SForall)):
            x = trace_var(f.var)
            g = set_guard(x, self.ap) if is_set_var(f.var) else number_guard(f.var, x, self.ap)
            body = self(f.arg)
            if isinstance(f, SExists):
                return Exists(x, And(g, body))
            return Forall(x, Implies(g, body))
        if isinstance(f, Member):
            return F(And(_at(mark(f.y), trace_var(f.y)), _at(SET_MARK, trace_var(f.Y))))
        if isinstance(f, Less):
            return less_gadget(f.a, f.b)
        if isinstance(f, Add):
            return self.add(f.a, f.b, f.c)
        if isinstance(f, Mul):
            return self.mul(f.a, f.b, f.c)
        raise ReductionError(f"not a flat formula: {f!r}")

    def add(self, y1, y2, y3):
        a1, a2, a3 = (_at(mark(y), trace_var(y)) for y in (y1, y2, y3))
        return disj([
            And(a1, F(And(a2, a3))),
            And(a2, F(And(a1, a3))),
            conj([Not(a1), Not(a2), self.alpha_add(y1, y2, y3)]),
        ])

    def alpha_add(self, y1, y2, y3):
        x = f"v{next(self.fresh)}"
        same = G(Iff(_at(mark(y2), trace_var(y2)), _at(mark(y2), x)))
        same3 = G(Iff(_at(mark(y3), trace_var(y3)), _at(mark(y3), x)))
        walk = X(F(And(_at(mark(y1), trace_var(y1)), X(_at(mark(y3), x)))), {Prop(mark(y2))})
        return Exists(x, conj([same, same3, walk]))

    def mul(self, y1, y2, y3):
        a1, a2, a3 = (_at(mark(y), trace_var(y)) for y in (y1, y2, y3))
        return disj([
            And(a1, a3),
            And(a2, a3),
            conj([Not(a1), Not(a2), self.alpha_mult(y1, y2, y3)]),
        ])

    def alpha_mult(self, y1, y2, y3):
        k = next(self.fresh)
        x, xp = f"w{k}", f"w{k}'"
        d = _at(DOLLAR, x)
        body = conj([
            periodic_shape(x, xp, y3, self.ap),
            G(Iff(d, _at(DOLLAR_PRIME, xp))),
            periodicity(x, xp, self.step),
            U(d, And(Not(d), _at(mark(y1), trace_var(y1)))),
            G(Iff(_at(mark(y3), trace_var(y3)), _at(mark(y3), x))),
            F(And(_at(mark(y2), trace_var(y2)), _at(mark(y3), x)), {Prop(DOLLAR)}),
        ])
        return Exists(x, Exists(xp, body))


def less_gadget(y1: str, y2: str):
    return F(And(_at(mark(y1), trace_var(y1)), X(F(_at(mark(y2), trace_var(y2))))))


def periodic_shape(x: str, xp: str, y3: str, ap):
    """Alternating ``$`` blocks on ``x`` (plus ``#(y3)``) and ``$'`` blocks on ``xp``."""
    d, dp = _at(DOLLAR, x), _at(DOLLAR_PRIME, xp)
    return conj([
        d, G(F(d)), G(F(Not(d))), _only(x, [DOLLAR, mark(y3)], ap),
        dp, G(F(dp)), G(F(Not(dp))), _only(xp, [DOLLAR_PRIME], ap),
    ])


def periodicity(x: str, xp: str, step_label: str = DOLLAR_PRIME):
    """Consecutive blocks of ``x`` have equal length (given the shape and the copy)."""
    d, dp = _at(DOLLAR, x), _at(DOLLAR_PRIME, xp)
    upper = Implies(d, X(U(And(d, Not(dp)), conj([Not(d), Not(dp), X(dp)])), {Prop(step_label)}))
    lower = Implies(Not(d), X(U(And(Not(d), dp), conj([d, dp, X(Not(dp))])), {Prop(DOLLAR_PRIME)}))
    return G(And(upper, lower), {Prop(DOLLAR), Prop(DOLLAR_PRIME)})


def hyp_s(sentence: Soa, periodicity_step_label: str = DOLLAR_PRIME, ap: Optional[list] = None):
    """Translate a flat sentence; atoms repeating a variable are split first.

    ``periodicity_step_label`` is the label of the next operator after a
    ``$`` block in the periodicity gadget.
    """
    for g in soa_walk(sentence):
        if not isinstance(g, FLAT_ATOMS + (SNot, SOr, SExists, SForall)):
            raise ReductionError("sentence has non-flat atoms; normalize it first")
    sentence = separate_repeats(sentence)
    if ap is None:
        ap = alphabet(first_order_vars(sentence))
    return _Compiler(ap, periodicity_step_label)(sentence)


def hyp_atom_s(atom: Soa, ap, periodicity_step_label: str = DOLLAR_PRIME):
    """Translation of a single atom with free trace variables ``x_y``."""
    return _Compiler(ap, periodicity_step_label)(atom)


# -- trace families ------------------------------------------------------------

def number_trace(y: str, n: int) -> LassoTrace:
    return LassoTrace((EMPTY_LETTER,) * n + (letter(mark(y)),), (EMPTY_LETTER,))


def set_trace(s: Iterable[int]) -> LassoTrace:
    s = set(s)
    top = max(s, default=-1)
    return LassoTrace(tuple(letter(SET_MARK) if i in s else EMPTY_LETTER for i in range(top + 1)),
                      (EMPTY_LETTER,))


def block_trace(prop: str, on: int, off: int) -> LassoTrace:
    return LassoTrace((), (letter(prop),) * on + (EMPTY_LETTER,) * off)


def _set_name(s) -> str:
    return "set_" + ("_".join(map(str, sorted(s))) or "empty")


def pool_s(number_vars: Iterable[str], b: int) -> TraceSet:
    """Finite stand-in for the system's traces at bound ``b``."""
    if b < 1:
        raise ValueError("bound must be at least 1")
    vs = sorted(number_vars)
    entries = []
    for y in vs:
        entries += [(f"num_{y}_{n}", number_trace(y, n)) for n in range(b + 1)]
    for mask in range(1 << (b + 1)):
        s = [i for i in range(b + 1) if mask >> i & 1]
        entries.append((_set_name(s), set_trace(s)))
    for y in vs:
        for m in range(1, b + 1):
            per = block_trace(DOLLAR, m, m)
            for n3 in range(b * b + 1):
                entries.append((f"mult_{y}_{m}_{n3}", pointwise_union(number_trace(y, n3), per)))
    for m in range(1, b + 1):
        entries.append((f"copy_{m}", block_trace(DOLLAR_PRIME, m, m)))
    for y2 in vs:
        for y3 in vs:
            if y2 == y3:
                continue
            for n2 in range(1, b + 1):
                for n3 in range(2 * b + 1):
                    t = pointwise_union(number_trace(y2, n2), number_trace(y3, n3))
                    entries.append((f"add_{y2}_{n2}_{y3}_{n3}", t))
    return TraceSet(entries)


# -- gadget verification ---------------------------------------------------------

def _numbers(**vals) -> dict:
    return {trace_var(y): PointedTrace(number_trace(y, n), 0) for y, n in vals.items()}


def verify_gadgets_s(b: int, periodicity_step_label: str = DOLLAR_PRIME,
                     families=("add", "mul", "less", "member", "periodicity")) -> Report:
    """Compare each atom gadget with arithmetic on a grid of concrete numbers."""
    ys = ["y1", "y2", "y3"]
    ap = alphabet(ys)
    comp = _Compiler(ap, periodicity_step_label)
    add_f = comp(Add(*ys))
    mul_f = comp(Mul(*ys))
    less_f = comp(Less("y1", "y2"))
    mem_f = comp(Member("y1", "Y"))
    per_f = And(And(periodic_shape("x", "x'", "y3", ap), G(Iff(_at(DOLLAR, "x"), _at(DOLLAR_PRIME, "x'")))),
                periodicity("x", "x'", periodicity_step_label))
    pool = pool_s(ys, b)
    model = Model(pool, [add_f, mul_f, less_f, mem_f, per_f])
    rep = Report()
    rep.caveats.append("pool adds traces with both #(y2) and #(y3) marks as addition witnesses")

    if "add" in families:
        for n1 in range(b + 1):
            for n2 in range(b + 1):
                got = {n3 for n3 in range(2 * b + 1) if model.holds(add_f, _numbers(y1=n1, y2=n2, y3=n3))}
                rep.add("add", {"n1": n1, "n2": n2}, {n1 + n2}, got)
    if "mul" in families:
        top = min(b, 4)
        for n1 in range(top + 1):
            for n2 in range(top + 1):
                got = {n3 for n3 in range(b * b + 1) if model.holds(mul_f, _numbers(y1=n1, y2=n2, y3=n3))}
                rep.add("mul", {"n1": n1, "n2": n2}, {n1 * n2}, got)
    if "less" in families:
        for n1 in range(2 * b + 1):
            for n2 in range(2 * b + 1):
                rep.add("less", {"n1": n1, "n2": n2}, n1 < n2,
                        model.holds(less_f, _numbers(y1=n1, y2=n2)))
    if "member" in families:
        for mask in range(1 << (b + 1)):
            s = [i for i in range(b + 1) if mask >> i & 1]
            for n in range(b + 1):
                a = _numbers(y1=n)
                a[trace_var("Y")] = PointedTrace(set_trace(s), 0)
                rep.add("member", {"n": n, "set": s}, n in s, model.holds(mem_f, a))
    if "periodicity" in families:
        for on in range(1, b + 1):
            for off in range(1, b + 1):
                for m in range(1, b + 1):
                    a = {"x": PointedTrace(block_trace(DOLLAR, on, off), 0),
                         "x'": PointedTrace(block_trace(DOLLAR_PRIME, m, m), 0)}
                    rep.add("periodicity", {"on": on, "off": off, "copy": m},
                            on == off == m, model.holds(per_f, a))
    return rep


def model_check_s(sentence: Soa, b: int, periodicity_step_label: str = DOLLAR_PRIME) -> bool:
    """Evaluate the translation of ``sentence`` over ``pool_s`` at bound ``b``."""
    f = hyp_s(sentence, periodicity_step_label)
    return check_traceset(pool_s(first_order_vars(separate_repeats(sentence)), b), f)
