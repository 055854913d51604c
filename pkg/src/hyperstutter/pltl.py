"""Exact PLTL evaluation on lasso traces, change points and stutter moves."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Iterable, Optional

from .logic import (
    Pltl, PNext, PNot, POr, Prop, PSince, PUntil, PYesterday, pltl_subformulas,
)
from .traces import LassoTrace, PointedTrace


@dataclass(frozen=True)
class PeriodicBits:
    """Boolean sequence with ``bit(i) = bits[T + (i - T) % P]`` for ``i >= T``."""
    T: int
    P: int
    bits: tuple

    def at(self, i: int) -> bool:
        if i >= self.T:
            i = self.T + (i - self.T) % self.P
        return self.bits[i]

    def reshape(self, T: int, P: int) -> "PeriodicBits":
        return PeriodicBits(T, P, tuple(self.at(i) for i in range(T + P)))


def _align(*seqs: PeriodicBits) -> tuple[int, int]:
    return max(s.T for s in seqs), lcm(*(s.P for s in seqs))


def _pointwise(fn, *seqs: PeriodicBits) -> PeriodicBits:
    T, P = _align(*seqs)
    return PeriodicBits(T, P, tuple(fn(*(s.at(i) for s in seqs)) for i in range(T + P)))


def _until(a: PeriodicBits, b: PeriodicBits) -> PeriodicBits:
    T, P = _align(a, b)
    A = [a.at(i) for i in range(T + P)]
    B = [b.at(i) for i in range(T + P)]
    out = [False] * (T + P)
    # Loop part: walking backwards twice around the cycle reaches the fixpoint.
    nxt = False
    for k in range(2 * P - 1, -1, -1):
        i = T + k % P
        nxt = B[i] or (A[i] and nxt)
        if k < P:
            out[i] = nxt
    nxt = out[T]
    for i in range(T - 1, -1, -1):
        nxt = B[i] or (A[i] and nxt)
        out[i] = nxt
    return PeriodicBits(T, P, tuple(out))


def _since(a: PeriodicBits, b: PeriodicBits) -> PeriodicBits:
    T, P = _align(a, b)
    out = []
    seen = {}
    prev = False
    i = 0
    while True:
        cur = b.at(i) or (a.at(i) and prev)
        if i >= T:
            state = ((i - T) % P, cur)
            if state in seen:
                start = seen[state]
                return PeriodicBits(start, i - start, tuple(out))
            seen[state] = i
        out.append(cur)
        prev = cur
        i += 1


def _eval(t: LassoTrace, f: Pltl, memo: dict) -> PeriodicBits:
    if f in memo:
        return memo[f]
    if isinstance(f, Prop):
        k = len(t.prefix)
        r = PeriodicBits(k, len(t.loop), tuple(f.name in a for a in t.prefix + t.loop))
    elif isinstance(f, PNot):
        r = _pointwise(lambda x: not x, _eval(t, f.arg, memo))
    elif isinstance(f, POr):
        r = _pointwise(lambda x, y: x or y, _eval(t, f.left, memo), _eval(t, f.right, memo))
    elif isinstance(f, PNext):
        c = _eval(t, f.arg, memo)
        T = max(c.T - 1, 0)
        r = PeriodicBits(T, c.P, tuple(c.at(i + 1) for i in range(T + c.P)))
    elif isinstance(f, PYesterday):
        c = _eval(t, f.arg, memo)
        r = PeriodicBits(c.T + 1, c.P, (False,) + tuple(c.at(i) for i in range(c.T + c.P)))
    elif isinstance(f, PUntil):
        r = _until(_eval(t, f.left, memo), _eval(t, f.right, memo))
    elif isinstance(f, PSince):
        r = _since(_eval(t, f.left, memo), _eval(t, f.right, memo))
    else:
        raise TypeError(f"not a PLTL formula: {f!r}")
    memo[f] = r
    return r


@lru_cache(maxsize=1 << 16)
def formula_bits(t: LassoTrace, f: Pltl) -> PeriodicBits:
    return _eval(t, f, {})


@dataclass(frozen=True)
class ExpansionTable:
    subformulas: tuple
    T: int
    P: int
    rows: tuple  # rows[i][k] is the bit of subformulas[k] at position i

    def bit(self, f: Pltl, i: int) -> bool:
        k = self.subformulas.index(f)
        if i >= self.T:
            i = self.T + (i - self.T) % self.P
        return self.rows[i][k]


def expansion(t: LassoTrace, formulas: Iterable[Pltl]) -> ExpansionTable:
    subs: list = []
    for f in formulas:
        for g in pltl_subformulas(f):
            if g not in subs:
                subs.append(g)
    memo: dict = {}
    seqs = [_eval(t, g, memo) for g in subs]
    if seqs:
        T, P = _align(*seqs)
    else:
        T, P = len(t.prefix), len(t.loop)
    rows = tuple(tuple(s.at(i) for s in seqs) for i in range(T + P))
    return ExpansionTable(tuple(subs), T, P, rows)


def pltl_holds(t: LassoTrace, i: int, f: Pltl) -> bool:
    return formula_bits(t, f).at(i)


# --------------------------------------------------------------------------
# Change points
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChangePointView:
    """Change points of a trace for a stutter set, eventually periodic."""
    T: int
    P: int
    bits: tuple
    convention_active: bool
    proper_max: Optional[int]  # largest proper point when convention_active

    def is_change_point(self, i: int) -> bool:
        if i >= self.T:
            i = self.T + (i - self.T) % self.P
        return self.bits[i]

    def proper(self, i: int) -> bool:
        if self.convention_active and i > self.proper_max:
            return False
        return self.is_change_point(i)

    def succ(self, i: int) -> int:
        j = i + 1
        while not self.is_change_point(j):
            j += 1
        return j

    def pred(self, i: int) -> Optional[int]:
        if i <= 0:
            return None
        j = i - 1
        if j >= self.T + self.P:
            j = self.T + self.P + (j - self.T) % self.P
            base = i - 1 - j
        else:
            base = 0
        while not self.is_change_point(j):
            j -= 1
        return j + base


@lru_cache(maxsize=1 << 16)
def change_points(t: LassoTrace, gamma: frozenset) -> ChangePointView:
    gamma = sorted(gamma, key=repr)
    seqs = [formula_bits(t, g) for g in gamma]
    if seqs:
        T0, P = _align(*seqs)
    else:
        T0, P = len(t.prefix), len(t.loop)
    T = T0 + 1
    flips = [i == 0 or any(s.at(i) != s.at(i - 1) for s in seqs) for i in range(T + P)]
    if any(flips[T:T + P]):
        return ChangePointView(T, P, tuple(flips), False, None)
    m = max(i for i in range(T) if flips[i])
    return ChangePointView(m + 1, 1, tuple(flips[:m + 1]) + (True,), True, m)


def gamma_succ(pt: PointedTrace, gamma: frozenset) -> PointedTrace:
    return PointedTrace(pt.trace, change_points(pt.trace, frozenset(gamma)).succ(pt.position))


def gamma_pred(pt: PointedTrace, gamma: frozenset) -> Optional[PointedTrace]:
    j = change_points(pt.trace, frozenset(gamma)).pred(pt.position)
    return None if j is None else PointedTrace(pt.trace, j)


def trace_shape(t: LassoTrace, gammas: Iterable[frozenset]) -> tuple[int, int]:
    """A (T, P) after which every listed change-point view is periodic."""
    T, P = len(t.prefix), len(t.loop)
    for g in gammas:
        v = change_points(t, frozenset(g))
        T, P = max(T, v.T), lcm(P, v.P)
    return T, P
