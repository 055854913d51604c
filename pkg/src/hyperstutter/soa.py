"""Second-order arithmetic over (+, *, <, in): syntax and bounded evaluation.

Variables starting with an uppercase letter are set variables; all others
are number variables. Number variables whose name starts with ``_`` are
auxiliaries introduced by flattening and get a widened range when
evaluating with a bound.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterator, Union


class SoaSyntaxError(ValueError):
    pass


def is_set_var(name: str) -> bool:
    return name[:1].isupper()


# -- terms (only before flattening) ------------------------------------------

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TAdd:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TMul:
    left: "Term"
    right: "Term"


Term = Union[TVar, TAdd, TMul]


# -- formulas ------------------------------------------------------------------

class Soa:
    __slots__ = ()


@dataclass(frozen=True)
class Add(Soa):
    """``a + b = c``"""
    a: str
    b: str
    c: str


@dataclass(frozen=True)
class Mul(Soa):
    """``a * b = c``"""
    a: str
    b: str
    c: str


@dataclass(frozen=True)
class Less(Soa):
    a: str
    b: str


@dataclass(frozen=True)
class Member(Soa):
    y: str
    Y: str


@dataclass(frozen=True)
class Eq(Soa):
    """General term equality; removed by ``normalize_flat``."""
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt(Soa):
    """General term comparison; removed by ``normalize_flat``."""
    left: Term
    right: Term


@dataclass(frozen=True)
class In(Soa):
    term: Term
    Y: str


@dataclass(frozen=True)
class SNot(Soa):
    arg: Soa


@dataclass(frozen=True)
class SOr(Soa):
    left: Soa
    right: Soa


@dataclass(frozen=True)
class SExists(Soa):
    var: str
    arg: Soa


@dataclass(frozen=True)
class SForall(Soa):
    var: str
    arg: Soa


def SAnd(a: Soa, b: Soa) -> Soa:
    return SNot(SOr(SNot(a), SNot(b)))


def equal(a: str, b: str) -> Soa:
    return SAnd(SNot(Less(a, b)), SNot(Less(b, a)))


FLAT_ATOMS = (Add, Mul, Less, Member)


def soa_children(f: Soa) -> tuple:
    if isinstance(f, SNot):
        return (f.arg,)
    if isinstance(f, SOr):
        return (f.left, f.right)
    if isinstance(f, (SExists, SForall)):
        return (f.arg,)
    return ()


def soa_walk(f: Soa) -> Iterator[Soa]:
    yield f
    for c in soa_children(f):
        yield from soa_walk(c)


def _term_vars(t: Term) -> set:
    if isinstance(t, TVar):
        return {t.name}
    return _term_vars(t.left) | _term_vars(t.right)


def atom_vars(f: Soa) -> tuple:
    if isinstance(f, (Add, Mul)):
        return (f.a, f.b, f.c)
    if isinstance(f, Less):
        return (f.a, f.b)
    if isinstance(f, Member):
        return (f.y, f.Y)
    if isinstance(f, (Eq, Lt)):
        return tuple(sorted(_term_vars(f.left) | _term_vars(f.right)))
    if isinstance(f, In):
        return tuple(sorted(_term_vars(f.term))) + (f.Y,)
    return ()


def soa_free_vars(f: Soa) -> set:
    if isinstance(f, (SExists, SForall)):
        return soa_free_vars(f.arg) - {f.var}
    kids = soa_children(f)
    if kids:
        return set().union(*(soa_free_vars(k) for k in kids))
    return set(atom_vars(f))


def soa_vars(f: Soa) -> set:
    out = set()
    for g in soa_walk(f):
        out.update(atom_vars(g))
        if isinstance(g, (SExists, SForall)):
            out.add(g.var)
    return out


def first_order_vars(f: Soa) -> list:
    return sorted(v for v in soa_vars(f) if not is_set_var(v))


def is_flat(f: Soa) -> bool:
    return not any(isinstance(g, (Eq, Lt, In)) for g in soa_walk(f))


def quantifier_count(f: Soa) -> int:
    return sum(isinstance(g, (SExists, SForall)) for g in soa_walk(f))


# -- parsing -------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(--[^\n]*)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


def _tokens(text: str) -> list:
    out = []
    for m in _TOK.finditer(text):
        if m.group(1):
            continue
        tok = m.group(2) or m.group(3)
        if tok:
            out.append(tok)
    return out + [""]


class _SoaParser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def accept(self, t):
        if self.tok == t:
            self.i += 1
            return True
        return False

    def expect(self, t):
        if not self.accept(t):
            raise SoaSyntaxError(f"expected {t!r}, found {self.tok or 'end of input'!r}")

    def name(self):
        t = self.tok
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", t) or t in ("exists", "forall", "in"):
            raise SoaSyntaxError(f"expected a variable, found {t or 'end of input'!r}")
        self.i += 1
        return t

    def formula(self):
        if self.tok in ("exists", "forall"):
            q = self.tok
            self.i += 1
            v = self.name()
            self.expect(".")
            body = self.formula()
            return SExists(v, body) if q == "exists" else SForall(v, body)
        left = self.conj()
        while self.accept("|"):
            left = SOr(left, self.conj_or_quant())
        return left

    def conj_or_quant(self):
        if self.tok in ("exists", "forall"):
            return self.formula()
        return self.conj()

    def conj(self):
        left = self.unary()
        while self.accept("&"):
            left = SAnd(left, self.unary_or_quant())
        return left

    def unary_or_quant(self):
        if self.tok in ("exists", "forall"):
            return self.formula()
        return self.unary()

    def unary(self):
        if self.accept("~"):
            if self.tok in ("exists", "forall"):
                return SNot(self.formula())
            return SNot(self.unary())
        if self.tok == "(":
            save = self.i
            try:
                return self.comparison()
            except SoaSyntaxError:
                self.i = save
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return f
        return self.comparison()

    def term(self):
        left = self.factor()
        while self.accept("+"):
            left = TAdd(left, self.factor())
        return left

    def factor(self):
        left = self.atom_term()
        while self.accept("*"):
            left = TMul(left, self.atom_term())
        return left

    def atom_term(self):
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        v = self.name()
        if is_set_var(v):
            raise SoaSyntaxError(f"set variable {v!r} used as a number")
        return TVar(v)

    def comparison(self):
        left = self.term()
        if self.accept("in"):
            Y = self.name()
            if not is_set_var(Y):
                raise SoaSyntaxError(f"{Y!r} is not a set variable")
            if isinstance(left, TVar):
                return Member(left.name, Y)
            return In(left, Y)
        if self.accept("<"):
            right = self.term()
            if isinstance(left, TVar) and isinstance(right, TVar):
                return Less(left.name, right.name)
            return Lt(left, right)
        if self.accept("="):
            right = self.term()
            if isinstance(right, TVar) and isinstance(left, (TAdd, TMul)) \
                    and isinstance(left.left, TVar) and isinstance(left.right, TVar):
                cls = Add if isinstance(left, TAdd) else Mul
                return cls(left.left.name, left.right.name, right.name)
            return Eq(left, right)
        raise SoaSyntaxError(f"expected '=', '<' or 'in', found {self.tok or 'end of input'!r}")


def parse_soa(text: str) -> Soa:
    p = _SoaParser(text)
    f = p.formula()
    if p.tok != "":
        raise SoaSyntaxError(f"unexpected {p.tok!r}")
    return f


# -- printing ------------------------------------------------------------------

def print_term(t: Term, parent: str = "") -> str:
    if isinstance(t, TVar):
        return t.name
    op = "+" if isinstance(t, TAdd) else "*"
    s = f"{print_term(t.left, op)} {op} {print_term(t.right, op)}"
    if parent == "*" and op == "+" or parent == op:
        return f"({s})"
    return s


def _and_parts(f):
    if isinstance(f, SNot) and isinstance(f.arg, SOr) \
            and isinstance(f.arg.left, SNot) and isinstance(f.arg.right, SNot):
        return f.arg.left.arg, f.arg.right.arg
    return None


def print_soa(f: Soa) -> str:
    if isinstance(f, Add):
        return f"{f.a} + {f.b} = {f.c}"
    if isinstance(f, Mul):
        return f"{f.a} * {f.b} = {f.c}"
    if isinstance(f, Less):
        return f"{f.a} < {f.b}"
    if isinstance(f, Member):
        return f"{f.y} in {f.Y}"
    if isinstance(f, Eq):
        return f"{print_term(f.left, '=')} = {print_term(f.right, '=')}"
    if isinstance(f, Lt):
        return f"{print_term(f.left, '=')} < {print_term(f.right, '=')}"
    if isinstance(f, In):
        return f"{print_term(f.term, '=')} in {f.Y}"
    if isinstance(f, SExists):
        return f"exists {f.var}. {print_soa(f.arg)}"
    if isinstance(f, SForall):
        return f"forall {f.var}. {print_soa(f.arg)}"
    parts = _and_parts(f)
    if parts:
        return f"{_operand(parts[0])} & {_operand(parts[1])}"
    if isinstance(f, SNot):
        return f"~{_operand(f.arg)}"
    if isinstance(f, SOr):
        return f"{_operand(f.left)} | {_operand(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Soa) -> str:
    s = print_soa(f)
    if isinstance(f, (SOr, SExists, SForall, Add, Mul, Less, Member, Eq, Lt, In)) or _and_parts(f):
        return f"({s})"
    return s


# -- flattening ----------------------------------------------------------------

class _Names:
    def __init__(self, taken):
        self.taken = set(taken)
        self.c = count(1)

    def __call__(self) -> str:
        while True:
            n = f"_t{next(self.c)}"
            if n not in self.taken:
                self.taken.add(n)
                return n


def _name_term(t: Term, fresh, defs: list) -> str:
    """Variable equal to ``t``; records ``(atom, fresh var)`` definitions."""
    if isinstance(t, TVar):
        return t.name
    a = _name_term(t.left, fresh, defs)
    b = _name_term(t.right, fresh, defs)
    v = fresh()
    defs.append((Add if isinstance(t, TAdd) else Mul)(a, b, v))
    defs_vars = defs  # noqa: F841 (kept for readability of the recursion)
    return v


def _wrap(defs: list, body: Soa) -> Soa:
    for d in reversed(defs):
        body = SExists(d.c, SAnd(d, body))
    return body


def _flatten_atom(f: Soa, fresh) -> Soa:
    defs: list = []
    if isinstance(f, Eq):
        left, right = f.left, f.right
        if isinstance(left, TVar) and not isinstance(right, TVar):
            left, right = right, left
        if isinstance(right, TVar) and not isinstance(left, TVar):
            a = _name_term(left.left, fresh, defs)
            b = _name_term(left.right, fresh, defs)
            cls = Add if isinstance(left, TAdd) else Mul
            return _wrap(defs, cls(a, b, right.name))
        a = _name_term(left, fresh, defs)
        b = _name_term(right, fresh, defs)
        return _wrap(defs, equal(a, b))
    if isinstance(f, Lt):
        a = _name_term(f.left, fresh, defs)
        b = _name_term(f.right, fresh, defs)
        return _wrap(defs, Less(a, b))
    if isinstance(f, In):
        a = _name_term(f.term, fresh, defs)
        return _wrap(defs, Member(a, f.Y))
    return f


def normalize_flat(f: Soa) -> Soa:
    """Equivalent formula using only flat atoms."""
    fresh = _Names(soa_vars(f))

    def go(g):
        if isinstance(g, SNot):
            return SNot(go(g.arg))
        if isinstance(g, SOr):
            return SOr(go(g.left), go(g.right))
        if isinstance(g, SExists):
            return SExists(g.var, go(g.arg))
        if isinstance(g, SForall):
            return SForall(g.var, go(g.arg))
        return _flatten_atom(g, fresh)

    return go(f)


# -- bounded evaluation ----------------------------------------------------------

def aux_bound(b: int) -> int:
    return 2 * b * b + 2 * b


def _term_value(t: Term, env) -> int:
    if isinstance(t, TVar):
        return env[t.name]
    l, r = _term_value(t.left, env), _term_value(t.right, env)
    return l + r if isinstance(t, TAdd) else l * r


def eval_soa_bounded(sentence: Soa, b: int, env=None) -> bool:
    """Numbers range over 0..b (auxiliaries over 0..2b^2+2b), sets over subsets of 0..b."""
    env = dict(env or {})
    free = soa_free_vars(sentence) - set(env)
    if free:
        raise ValueError(f"free variables: {', '.join(sorted(free))}")
    sets = [frozenset(i for i in range(b + 1) if mask >> i & 1) for mask in range(1 << (b + 1))]

    def domain(v):
        if is_set_var(v):
            return sets
        return range((aux_bound(b) if v.startswith("_") else b) + 1)

    def ev(f):
        if isinstance(f, Add):
            return env[f.a] + env[f.b] == env[f.c]
        if isinstance(f, Mul):
            return env[f.a] * env[f.b] == env[f.c]
        if isinstance(f, Less):
            return env[f.a] < env[f.b]
        if isinstance(f, Member):
            return env[f.y] in env[f.Y]
        if isinstance(f, Eq):
            return _term_value(f.left, env) == _term_value(f.right, env)
        if isinstance(f, Lt):
            return _term_value(f.left, env) < _term_value(f.right, env)
        if isinstance(f, In):
            return _term_value(f.term, env) in env[f.Y]
        if isinstance(f, SNot):
            return not ev(f.arg)
        if isinstance(f, SOr):
            return ev(f.left) or ev(f.right)
        if isinstance(f, (SExists, SForall)):
            want = isinstance(f, SExists)
            saved = env.get(f.var, None)
            try:
                for val in domain(f.var):
                    env[f.var] = val
                    if ev(f.arg) == want:
                        return want
                return not want
            finally:
                if saved is None:
                    env.pop(f.var, None)
                else:
                    env[f.var] = saved
        raise TypeError(f"not a formula: {f!r}")

    return ev(sentence)


def separate_repeats(f: Soa) -> Soa:
    """Rewrite atoms mentioning a variable twice using fresh equal copies.

    The trace gadgets assume pairwise distinct traces per atom position.
    """
    taken = soa_vars(f)
    c = count(1)

    def copy_of(v):
        while True:
            n = f"{v}__{next(c)}"
            if n not in taken:
                taken.add(n)
                return n

    def go(g):
        if isinstance(g, (Add, Mul)):
            args = [g.a, g.b, g.c]
            extra = []
            for k in range(1, 3):
                if args[k] in args[:k]:
                    n = copy_of(args[k])
                    extra.append((n, args[k]))
                    args[k] = n
            if not extra:
                return g
            body = type(g)(*args)
            for n, v in extra:
                body = SAnd(equal(v, n), body)
            for n, _ in reversed(extra):
                body = SExists(n, body)
            return body
        if isinstance(g, Less) and g.a == g.b:
            n = copy_of(g.b)
            return SExists(n, SAnd(equal(g.a, n), Less(g.a, n)))
        if isinstance(g, SNot):
            return SNot(go(g.arg))
        if isinstance(g, SOr):
            return SOr(go(g.left), go(g.right))
        if isinstance(g, (SExists, SForall)):
            return type(g)(g.var, go(g.arg))
        return g

    return go(f)
