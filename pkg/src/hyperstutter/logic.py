"""Abstract syntax for PLTL and for hyperLTL with stuttering and contexts.

Both logics use frozen dataclasses with structural equality. Only the core
connectives are represented; conjunction, implication, the derived temporal
operators and ``true`` are built by the helper functions below and never
appear as nodes of their own (the hyper logic keeps a single ``Top``
constant so that ``F``/``G``/``O``/``H`` need no trace variable).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator, Optional, Union

# Reserved proposition used for ``true`` in PLTL and for ``true@x``.
TRUE_PROP = "_t"


# --------------------------------------------------------------------------
# PLTL
# --------------------------------------------------------------------------


class Pltl:
    __slots__ = ()


@dataclass(frozen=True)
class Prop(Pltl):
    name: str


@dataclass(frozen=True)
class PNot(Pltl):
    arg: Pltl


@dataclass(frozen=True)
class POr(Pltl):
    left: Pltl
    right: Pltl


@dataclass(frozen=True)
class PNext(Pltl):
    arg: Pltl


@dataclass(frozen=True)
class PUntil(Pltl):
    left: Pltl
    right: Pltl


@dataclass(frozen=True)
class PYesterday(Pltl):
    arg: Pltl


@dataclass(frozen=True)
class PSince(Pltl):
    left: Pltl
    right: Pltl


def ptrue() -> Pltl:
    return POr(Prop(TRUE_PROP), PNot(Prop(TRUE_PROP)))


def pand(a: Pltl, b: Pltl) -> Pltl:
    return PNot(POr(PNot(a), PNot(b)))


def pimplies(a: Pltl, b: Pltl) -> Pltl:
    return POr(PNot(a), b)


def piff(a: Pltl, b: Pltl) -> Pltl:
    return pand(pimplies(a, b), pimplies(b, a))


def pF(a: Pltl) -> Pltl:
    return PUntil(ptrue(), a)


def pG(a: Pltl) -> Pltl:
    return PNot(pF(PNot(a)))


def pO(a: Pltl) -> Pltl:
    return PSince(ptrue(), a)


def pH(a: Pltl) -> Pltl:
    return PNot(pO(PNot(a)))


def pltl_children(f: Pltl) -> tuple:
    if isinstance(f, Prop):
        return ()
    if isinstance(f, (PNot, PNext, PYesterday)):
        return (f.arg,)
    return (f.left, f.right)


def pltl_subformulas(f: Pltl) -> list[Pltl]:
    """Distinct subformulas of ``f`` in post-order (children first)."""
    out: list[Pltl] = []
    seen: set = set()

    def walk(g):
        if g in seen:
            return
        for c in pltl_children(g):
            walk(c)
        seen.add(g)
        out.append(g)

    walk(f)
    return out


def pltl_is_past_free(f: Pltl) -> bool:
    return not any(isinstance(g, (PYesterday, PSince)) for g in pltl_subformulas(f))


def pltl_props(f: Pltl) -> set[str]:
    return {g.name for g in pltl_subformulas(f) if isinstance(g, Prop)}


def pltl_depth(f: Pltl) -> int:
    kids = pltl_children(f)
    return 0 if not kids else 1 + max(pltl_depth(c) for c in kids)


# A stutter label: a finite set of PLTL formulas.
StutterSet = frozenset
EMPTY: StutterSet = frozenset()


def stutter(*formulas: Pltl) -> StutterSet:
    return frozenset(formulas)


# --------------------------------------------------------------------------
# Hyper formulas
# --------------------------------------------------------------------------


class Hyper:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class AtomAt(Hyper):
    prop: str
    var: str


@dataclass(frozen=True)
class Top(Hyper):
    pass


@dataclass(frozen=True)
class Not(Hyper):
    arg: Hyper


@dataclass(frozen=True)
class Or(Hyper):
    left: Hyper
    right: Hyper


@dataclass(frozen=True)
class InContext(Hyper):
    vars: frozenset
    arg: Hyper

    def __post_init__(self):
        if not self.vars:
            raise ValueError("context must contain at least one trace variable")
        object.__setattr__(self, "vars", frozenset(self.vars))


@dataclass(frozen=True)
class Next(Hyper):
    gamma: StutterSet
    arg: Hyper


@dataclass(frozen=True)
class Until(Hyper):
    gamma: StutterSet
    left: Hyper
    right: Hyper


@dataclass(frozen=True)
class Yesterday(Hyper):
    gamma: StutterSet
    arg: Hyper


@dataclass(frozen=True)
class Since(Hyper):
    gamma: StutterSet
    left: Hyper
    right: Hyper


@dataclass(frozen=True)
class Exists(Hyper):
    var: str
    arg: Hyper


@dataclass(frozen=True)
class Forall(Hyper):
    var: str
    arg: Hyper


TEMPORAL = (Next, Until, Yesterday, Since)
QUANTIFIERS = (Exists, Forall)


def true_at(x: str) -> Hyper:
    return Or(AtomAt(TRUE_PROP, x), Not(AtomAt(TRUE_PROP, x)))


def And(a: Hyper, b: Hyper) -> Hyper:
    return Not(Or(Not(a), Not(b)))


def Implies(a: Hyper, b: Hyper) -> Hyper:
    return Or(Not(a), b)


def Iff(a: Hyper, b: Hyper) -> Hyper:
    return And(Implies(a, b), Implies(b, a))


def F(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Until(frozenset(gamma), Top(), f)


def G(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Not(F(Not(f), gamma))


def O(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Since(frozenset(gamma), Top(), f)


def H(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Not(O(Not(f), gamma))


def X(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Next(frozenset(gamma), f)


def Y(f: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Yesterday(frozenset(gamma), f)


def U(a: Hyper, b: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Until(frozenset(gamma), a, b)


def S(a: Hyper, b: Hyper, gamma: Iterable[Pltl] = EMPTY) -> Hyper:
    return Since(frozenset(gamma), a, b)


def Ctx(vars: Iterable[str], f: Hyper) -> Hyper:
    return InContext(frozenset(vars), f)


def conj(formulas: Iterable[Hyper]) -> Hyper:
    formulas = list(formulas)
    if not formulas:
        return Top()
    return reduce(And, formulas)


def disj(formulas: Iterable[Hyper]) -> Hyper:
    formulas = list(formulas)
    if not formulas:
        return Not(Top())
    return reduce(Or, formulas)


def children(f: Hyper) -> tuple:
    if isinstance(f, (AtomAt, Top)):
        return ()
    if isinstance(f, (Not, InContext, Next, Yesterday, Exists, Forall)):
        return (f.arg,)
    return (f.left, f.right)


def replace_children(f: Hyper, kids: tuple) -> Hyper:
    if isinstance(f, (AtomAt, Top)):
        return f
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Or):
        return Or(*kids)
    if isinstance(f, InContext):
        return InContext(f.vars, kids[0])
    if isinstance(f, Next):
        return Next(f.gamma, kids[0])
    if isinstance(f, Yesterday):
        return Yesterday(f.gamma, kids[0])
    if isinstance(f, Until):
        return Until(f.gamma, *kids)
    if isinstance(f, Since):
        return Since(f.gamma, *kids)
    if isinstance(f, Exists):
        return Exists(f.var, kids[0])
    if isinstance(f, Forall):
        return Forall(f.var, kids[0])
    raise TypeError(f"not a hyper formula: {f!r}")


def walk(f: Hyper) -> Iterator[Hyper]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def free_vars(f: Hyper) -> frozenset:
    if isinstance(f, AtomAt):
        return frozenset([f.var])
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.arg) - {f.var}
    out = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_vars(f: Hyper) -> set[str]:
    """Every trace variable mentioned anywhere, including in contexts."""
    out: set[str] = set()
    for g in walk(f):
        if isinstance(g, AtomAt):
            out.add(g.var)
        elif isinstance(g, QUANTIFIERS):
            out.add(g.var)
        elif isinstance(g, InContext):
            out |= g.vars
    return out


def props(f: Hyper) -> set[str]:
    return {g.prop for g in walk(f) if isinstance(g, AtomAt)}


def is_sentence(f: Hyper) -> bool:
    return not free_vars(f)


def labels(f: Hyper) -> set:
    return {g.gamma for g in walk(f) if isinstance(g, TEMPORAL)}


def is_past_free(f: Hyper) -> bool:
    """No hyper-level Y/S (labels are not inspected)."""
    return not any(isinstance(g, (Yesterday, Since)) for g in walk(f))


def is_quantifier_free(f: Hyper) -> bool:
    return not any(isinstance(g, QUANTIFIERS) for g in walk(f))


def quantifier_prefix(f: Hyper) -> tuple[list[tuple[str, str]], Hyper]:
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append(("E" if isinstance(f, Exists) else "A", f.var))
        f = f.arg
    return prefix, f


def is_prenex(f: Hyper) -> bool:
    _, matrix = quantifier_prefix(f)
    return is_quantifier_free(matrix)


def hyper_depth(f: Hyper) -> int:
    kids = children(f)
    return 0 if not kids else 1 + max(hyper_depth(c) for c in kids)


def rename_free(f: Hyper, old: str, new: str) -> Hyper:
    """Rename free occurrences of ``old`` (including in contexts) to ``new``."""
    if isinstance(f, AtomAt):
        return AtomAt(f.prop, new) if f.var == old else f
    if isinstance(f, QUANTIFIERS) and f.var == old:
        return f
    if isinstance(f, InContext):
        vs = frozenset(new if v == old else v for v in f.vars)
        return InContext(vs, rename_free(f.arg, old, new))
    kids = children(f)
    if not kids:
        return f
    return replace_children(f, tuple(rename_free(c, old, new) for c in kids))


def substitute_vars(f: Hyper, mapping: dict) -> Hyper:
    """Simultaneous renaming of free variables, e.g. ``alpha[x/x0, x'/x0']``."""
    if isinstance(f, AtomAt):
        return AtomAt(f.prop, mapping.get(f.var, f.var))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return replace_children(f, (substitute_vars(f.arg, inner),))
    if isinstance(f, InContext):
        vs = frozenset(mapping.get(v, v) for v in f.vars)
        return InContext(vs, substitute_vars(f.arg, mapping))
    kids = children(f)
    if not kids:
        return f
    return replace_children(f, tuple(substitute_vars(c, mapping) for c in kids))


# --------------------------------------------------------------------------
# Fragments and syntactic contexts
# --------------------------------------------------------------------------

HYPERLTL = "HyperLTL"
HYPERLTL_C = "HyperLTL_C"
HYPERLTL_S = "HyperLTL_S"
GHYLTL_SC = "GHyLTL_SC"


@dataclass(frozen=True)
class Fragment:
    label: str
    prenex: bool
    past_free: bool


def classify_fragment(f: Hyper) -> Fragment:
    prenex = is_prenex(f)
    past_free = is_past_free(f)
    has_ctx = any(isinstance(g, InContext) for g in walk(f))
    gammas = labels(f)
    all_empty = all(not g for g in gammas)
    labels_past_free = all(pltl_is_past_free(t) for g in gammas for t in g)
    base = prenex and past_free
    if base and not has_ctx and all_empty:
        label = HYPERLTL
    elif base and all_empty:
        label = HYPERLTL_C
    elif base and not has_ctx and labels_past_free:
        label = HYPERLTL_S
    else:
        label = GHYLTL_SC
    return Fragment(label, prenex, past_free)


@dataclass(frozen=True)
class Universal:
    """The context VAR, kept symbolic."""

    def __repr__(self):
        return "Universal()"


UNIVERSAL = Universal()


def subformula_at(f: Hyper, path: Iterable[int]) -> Hyper:
    for i in path:
        kids = children(f)
        if not 0 <= i < len(kids):
            raise IndexError(f"invalid path step {i} at {type(f).__name__}")
        f = kids[i]
    return f


def context_of_subformula(sentence: Hyper, path: Iterable[int]):
    """Innermost context on the path from the root to the addressed node.

    Returns a frozenset of variables, or ``UNIVERSAL`` when no context
    operator lies on the path.
    """
    ctx: Union[frozenset, Universal] = UNIVERSAL
    f = sentence
    for i in path:
        if isinstance(f, InContext):
            ctx = f.vars
        kids = children(f)
        if not 0 <= i < len(kids):
            raise IndexError(f"invalid path step {i} at {type(f).__name__}")
        f = kids[i]
    return ctx
