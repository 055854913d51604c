"""Compilation of second-order arithmetic into hyperLTL with contexts only.

Everything lives over the two propositions ``#`` and ``$``; all temporal
operators carry the empty stutter label. Multiplication walks two periodic
traces with periods ``n2`` and ``n2 - 1`` side by side until both sit at
the end of a block.
"""
from __future__ import annotations

from itertools import count

from .hyper import Model, check_traceset
from .logic import (
    And, AtomAt, Ctx, Exists, F, Forall, G, Iff, Implies, Not, Or, U, X, conj, disj,
)
from .report import Report
from .soa import (
    FLAT_ATOMS, Add, Less, Member, Mul, SExists, SForall, SNot, SOr, Soa,
    is_set_var, separate_repeats, soa_walk,
)
from .traces import EMPTY_LETTER, LassoTrace, PointedTrace, TraceSet, letter, position_trace

MARK = "#"
DOLLAR = "$"


class ReductionError(ValueError):
    pass


def trace_var(v: str) -> str:
    return f"x_{v}"


def _h(x):
    return AtomAt(MARK, x)


def _d(x):
    return AtomAt(DOLLAR, x)


def set_guard(x: str):
    return G(Not(_d(x)))


def number_guard(x: str):
    return And(G(Not(_d(x))), U(Not(_h(x)), And(_h(x), X(G(Not(_h(x)))))))


def add_gadget(y1: str, y2: str, y3: str):
    a, b, c = trace_var(y1), trace_var(y2), trace_var(y3)
    return Ctx([a, c], F(And(_h(a), Ctx([b, c], F(And(_h(b), _h(c)))))))


def periodic_pair(x: str, xp: str):
    """``x`` and ``xp`` are the same ``$``-trace with blocks of one fixed length."""
    def shape(v):
        return conj([_d(v), G(F(_d(v))), G(F(Not(_d(v)))), G(Not(_h(v)))])

    shift = Ctx([x], U(_d(x), And(Not(_d(x)), Ctx([x, xp], G(Iff(_d(x), Not(_d(xp))))))))
    return conj([shape(x), shape(xp), G(Iff(_d(x), _d(xp))), shift])


def aligned(x0: str, x1: str):
    """Both pointers sit on the last position of a block."""
    return And(Iff(_d(x0), Not(X(_d(x0)))), Iff(_d(x1), Not(X(_d(x1)))))


def zero_case(y1, y2, y3):
    return And(Or(_h(trace_var(y1)), _h(trace_var(y2))), _h(trace_var(y3)))


def unit_case(y1, y2, y3):
    return X(conj(_h(trace_var(y)) for y in (y1, y2, y3)))


def ordered_guard(y1, y2):
    """``0 < n1 <= n2`` and ``n2 >= 2``."""
    a, b = trace_var(y1), trace_var(y2)
    return And(X(F(And(_h(a), F(_h(b))))), X(X(F(_h(b)))))


def ordered_product(y1, y2, y3, names):
    """Existential part of the ordered case; ``names`` gives the four helpers."""
    x0, x0p, x1, x1p = names
    a, b, c = trace_var(y1), trace_var(y2), trace_var(y3)
    walk = Ctx([a, c, x0], F(And(_h(a), Ctx([c, x0, x1], U(Not(aligned(x0, x1)),
                                                          And(aligned(x0, x1), X(_h(c))))))))
    body = conj([
        periodic_pair(x0, x0p),
        periodic_pair(x1, x1p),
        U(_d(x0), And(Not(_d(x0)), _h(b))),
        U(_d(x1), And(Not(_d(x1)), X(_h(b)))),
        walk,
    ])
    return Exists(x0, Exists(x0p, Exists(x1, Exists(x1p, body))))


class _Compiler:
    def __init__(self):
        self.fresh = count(1)

    def helpers(self):
        k = next(self.fresh)
        return (f"p{k}", f"p{k}'", f"q{k}", f"q{k}'")

    def ordered(self, y1, y2, y3):
        return And(ordered_guard(y1, y2), ordered_product(y1, y2, y3, self.helpers()))

    def __call__(self, f: Soa):
        if isinstance(f, SNot):
            return Not(self(f.arg))
        if isinstance(f, SOr):
            return Or(self(f.left), self(f.right))
        if isinstance(f, (SExists, SForall)):
            x = trace_var(f.var)
            g = set_guard(x) if is_set_var(f.var) else number_guard(x)
            body = self(f.arg)
            if isinstance(f, SExists):
                return Exists(x, And(g, body))
            return Forall(x, Implies(g, body))
        if isinstance(f, Member):
            return F(And(_h(trace_var(f.y)), _h(trace_var(f.Y))))
        if isinstance(f, Less):
            return F(And(_h(trace_var(f.a)), X(F(_h(trace_var(f.b))))))
        if isinstance(f, Add):
            return add_gadget(f.a, f.b, f.c)
        if isinstance(f, Mul):
            y1, y2, y3 = f.a, f.b, f.c
            return disj([
                zero_case(y1, y2, y3),
                unit_case(y1, y2, y3),
                self.ordered(y1, y2, y3),
                self.ordered(y2, y1, y3),
            ])
        raise ReductionError(f"not a flat formula: {f!r}")


def hyp_c(sentence: Soa):
    """Translate a flat sentence; atoms repeating a variable are split first."""
    for g in soa_walk(sentence):
        if not isinstance(g, FLAT_ATOMS + (SNot, SOr, SExists, SForall)):
            raise ReductionError("sentence has non-flat atoms; normalize it first")
    return _Compiler()(separate_repeats(sentence))


def hyp_atom_c(atom: Soa):
    return _Compiler()(atom)


def minimal_z(n1: int, n2: int) -> int:
    """Smallest z >= 1 with z*(n2-1) = z'*n2 - n1 for some z' >= 1."""
    if not (0 < n1 <= n2 and n2 >= 2):
        raise ValueError("need 0 < n1 <= n2 and n2 >= 2")
    z = 1
    while (z * (n2 - 1) + n1) % n2:
        z += 1
    return z


# -- trace families ------------------------------------------------------------

def number_trace(n: int) -> LassoTrace:
    return position_trace(n)


def set_trace(s) -> LassoTrace:
    s = set(s)
    top = max(s, default=-1)
    return LassoTrace(tuple(letter(MARK) if i in s else EMPTY_LETTER for i in range(top + 1)),
                      (EMPTY_LETTER,))


def block_trace(on: int, off: int) -> LassoTrace:
    return LassoTrace((), (letter(DOLLAR),) * on + (EMPTY_LETTER,) * off)


def period_of(t: LassoTrace):
    """Block length of a ``({$}^m {}^m)^w`` trace, else None."""
    loop = t.loop
    m = len(loop) // 2
    if t.prefix or m == 0 or loop != block_trace(m, m).loop:
        return None
    return m


def pool_c(b: int, number_bound: int = None) -> TraceSet:
    """Finite stand-in for the system's traces at bound ``b``.

    Number traces reach ``number_bound`` (default ``b*b + b``).
    """
    if b < 2:
        raise ValueError("bound must be at least 2")
    top = b * b + b if number_bound is None else number_bound
    entries = [(f"num_{n}", number_trace(n)) for n in range(top + 1)]
    for mask in range(1 << (b + 1)):
        s = [i for i in range(b + 1) if mask >> i & 1]
        if len(s) == 1 and s[0] <= top:
            continue  # already present as a number trace
        entries.append(("set_" + ("_".join(map(str, s)) or "empty"), set_trace(s)))
    entries += [(f"per_{m}", block_trace(m, m)) for m in range(1, b + 2)]
    return TraceSet(entries)


# -- gadget verification ---------------------------------------------------------

def _numbers(**vals) -> dict:
    return {trace_var(y): PointedTrace(number_trace(n), 0) for y, n in vals.items()}


def product_witness(n1: int, n2: int, b: int = None):
    """Helper traces chosen for the ordered product case, with their periods."""
    b = max(n1, n2) if b is None else b
    pool = pool_c(max(b, 2), number_bound=max(n1 * n2, b * b + b))
    names = ("p1", "p1'", "q1", "q1'")
    f = ordered_product("y1", "y2", "y3", names)
    w = Model(pool, [f]).witness(f, _numbers(y1=n1, y2=n2, y3=n1 * n2))
    if w is None:
        return None
    return {"x0": w["p1"], "x1": w["q1"],
            "x0_period": period_of(pool[w["p1"]]), "x1_period": period_of(pool[w["q1"]])}


def verify_gadgets_c(b: int, families=("add", "mul", "less", "member", "periodicity", "cases")) -> Report:
    ys = ("y1", "y2", "y3")
    comp = _Compiler()
    add_f = add_gadget(*ys)
    mul_f = comp(Mul(*ys))
    psi3 = comp.ordered("y1", "y2", "y3")
    psi4 = comp.ordered("y2", "y1", "y3")
    less_f = comp(Less("y1", "y2"))
    mem_f = comp(Member("y1", "Y"))
    per_f = periodic_pair("x", "x'")
    model = Model(pool_c(b), [add_f, mul_f, psi3, psi4, less_f, mem_f, per_f])
    rep = Report()
    rep.caveats.append("zero case and ordered cases use conjunctions where the printed gadget uses implications")

    def mul_set(f, n1, n2):
        return {n3 for n3 in range(b * b + 1) if model.holds(f, _numbers(y1=n1, y2=n2, y3=n3))}

    top = min(b, 4)
    if "add" in families:
        for n1 in range(b + 1):
            for n2 in range(b + 1):
                got = {n3 for n3 in range(2 * b + 1) if model.holds(add_f, _numbers(y1=n1, y2=n2, y3=n3))}
                rep.add("add", {"n1": n1, "n2": n2}, {n1 + n2}, got)
    if "mul" in families:
        for n1 in range(top + 1):
            for n2 in range(top + 1):
                rep.add("mul", {"n1": n1, "n2": n2}, {n1 * n2}, mul_set(mul_f, n1, n2))
    if "cases" in families:
        for n1 in range(top + 1):
            for n2 in range(top + 1):
                in3 = 0 < n1 <= n2 and n2 >= 2
                in4 = 0 < n2 <= n1 and n1 >= 2
                rep.add("ordered", {"n1": n1, "n2": n2}, {n1 * n2} if in3 else set(), mul_set(psi3, n1, n2))
                rep.add("swapped", {"n1": n1, "n2": n2}, {n1 * n2} if in4 else set(), mul_set(psi4, n1, n2))
    if "less" in families:
        for n1 in range(2 * b + 1):
            for n2 in range(2 * b + 1):
                rep.add("less", {"n1": n1, "n2": n2}, n1 < n2, model.holds(less_f, _numbers(y1=n1, y2=n2)))
    if "member" in families:
        for mask in range(1 << (b + 1)):
            s = [i for i in range(b + 1) if mask >> i & 1]
            for n in range(b + 1):
                a = _numbers(y1=n)
                a[trace_var("Y")] = PointedTrace(set_trace(s), 0)
                rep.add("member", {"n": n, "set": s}, n in s, model.holds(mem_f, a))
    if "periodicity" in families:
        shapes = [(on, off) for on in range(1, b + 2) for off in range(1, b + 2)]
        for on, off in shapes:
            for on2, off2 in shapes:
                a = {"x": PointedTrace(block_trace(on, off), 0), "x'": PointedTrace(block_trace(on2, off2), 0)}
                rep.add("periodicity", {"x": [on, off], "x'": [on2, off2]},
                        on == off == on2 == off2, model.holds(per_f, a))
    return rep


def model_check_c(sentence: Soa, b: int) -> bool:
    """Evaluate the translation of ``sentence`` over ``pool_c`` with numbers up to ``b``."""
    return check_traceset(pool_c(max(b, 2), number_bound=b), hyp_c(sentence))
