"""Evaluation of hyper formulas over sets of lasso traces.

Assignments are handled internally as sorted tuples ``(var, trace id,
position)``; contexts as ``None`` (universal) or a frozenset of variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .logic import (
    UNIVERSAL, AtomAt, Exists, Forall, InContext, Next, Not, Or, Since, Top,
    Universal, Until, Yesterday, children, free_vars, is_sentence, labels,
)
from .pltl import change_points, trace_shape
from .traces import LassoTrace, PointedTrace, TraceSet, TransitionSystem, system_traces

Context = Union[Universal, frozenset]


class EvaluationError(ValueError):
    pass


def _ctx(c) -> Optional[frozenset]:
    if c is None or isinstance(c, Universal):
        return None
    c = frozenset(c)
    if not c:
        raise EvaluationError("an explicit context must be nonempty")
    return c


def _moves(var, ctx) -> bool:
    return ctx is None or var in ctx


# Public assignment helpers work on dicts var -> PointedTrace.

def assign_succ(a: Mapping[str, PointedTrace], gamma, c: Context) -> dict:
    ctx = _ctx(c)
    gamma = frozenset(gamma)
    return {
        x: PointedTrace(pt.trace, change_points(pt.trace, gamma).succ(pt.position))
        if _moves(x, ctx) else pt
        for x, pt in a.items()
    }


def assign_pred(a: Mapping[str, PointedTrace], gamma, c: Context) -> Optional[dict]:
    ctx = _ctx(c)
    gamma = frozenset(gamma)
    out = {}
    for x, pt in a.items():
        if _moves(x, ctx):
            j = change_points(pt.trace, gamma).pred(pt.position)
            if j is None:
                return None
            out[x] = PointedTrace(pt.trace, j)
        else:
            out[x] = pt
    return out


class _Evaluator:
    def __init__(self, traces: list[LassoTrace], *roots):
        self.traces: list[LassoTrace] = []
        self.tid: dict = {}
        self.gammas = sorted(set().union(*(labels(r) for r in roots if r is not None)), key=repr)
        self.shapes: list = []
        self.views: dict = {}
        for t in traces:
            self.register(t)
        self.pool = list(range(len(self.traces)))
        self.memo: dict = {}
        self.info: dict = {}
        self.keep: dict = {}

    def register(self, t: LassoTrace) -> int:
        if t not in self.tid:
            self.tid[t] = len(self.traces)
            self.traces.append(t)
            self.shapes.append(trace_shape(t, self.gammas))
        return self.tid[t]

    def view(self, tid, gamma):
        key = (tid, gamma)
        v = self.views.get(key)
        if v is None:
            v = self.views[key] = change_points(self.traces[tid], gamma)
        return v

    def node_info(self, f):
        k = id(f)
        inf = self.info.get(k)
        if inf is None:
            past = any(isinstance(g, (Yesterday, Since)) for g in _walk(f))
            inf = self.info[k] = (not past, free_vars(f))
            self.keep[k] = f
        return inf

    def fold(self, asg) -> tuple:
        out = []
        for v, tid, pos in asg:
            T, P = self.shapes[tid]
            if pos >= T + P:
                pos = T + P + (pos - T) % P
            out.append((v, tid, pos))
        return tuple(out)

    def key(self, f, asg):
        past_free, fv = self.node_info(f)
        if past_free:
            return self.fold(tuple(e for e in asg if e[0] in fv))
        return asg

    # -- moves -------------------------------------------------------------

    def succ(self, asg, gamma, ctx):
        return tuple(
            (v, tid, self.view(tid, gamma).succ(pos)) if _moves(v, ctx) else (v, tid, pos)
            for v, tid, pos in asg
        )

    def pred(self, asg, gamma, ctx):
        out = []
        for v, tid, pos in asg:
            if _moves(v, ctx):
                j = self.view(tid, gamma).pred(pos)
                if j is None:
                    return None
                out.append((v, tid, j))
            else:
                out.append((v, tid, pos))
        return tuple(out)

    @staticmethod
    def bind(asg, var, tid):
        rest = [e for e in asg if e[0] != var]
        rest.append((var, tid, 0))
        rest.sort()
        return tuple(rest)

    # -- evaluation --------------------------------------------------------

    def ev(self, f, asg, ctx) -> bool:
        if isinstance(f, AtomAt):
            for v, tid, pos in asg:
                if v == f.var:
                    return f.prop in self.traces[tid].letter_at(pos)
            raise EvaluationError(f"unbound trace variable {f.var!r}")
        if isinstance(f, Top):
            return True
        if isinstance(f, Not):
            return not self.ev(f.arg, asg, ctx)
        if isinstance(f, Or):
            return self.ev(f.left, asg, ctx) or self.ev(f.right, asg, ctx)
        if isinstance(f, InContext):
            return self.ev(f.arg, asg, f.vars)
        mk = (id(f), self.key(f, asg), ctx)
        r = self.memo.get(mk)
        if r is not None:
            return r
        if isinstance(f, Next):
            r = self.ev(f.arg, self.succ(asg, f.gamma, ctx), ctx)
        elif isinstance(f, Yesterday):
            p = self.pred(asg, f.gamma, ctx)
            r = p is not None and self.ev(f.arg, p, ctx)
        elif isinstance(f, Until):
            r = self.until(f, asg, ctx)
        elif isinstance(f, Since):
            r = self.since(f, asg, ctx)
        elif isinstance(f, (Exists, Forall)):
            r = self.quantifier_block(f, asg, ctx) is not None
            if isinstance(f, Forall):
                r = not r
        else:
            raise TypeError(f"not a hyper formula: {f!r}")
        self.memo[mk] = r
        return r

    def until(self, f, asg, ctx) -> bool:
        if not any(_moves(v, ctx) for v, _, _ in asg):
            return self.ev(f.right, asg, ctx)
        past_free, _ = self.node_info(f)
        repeats = 1 if past_free else 3
        seen: dict = {}
        visited = []
        cur = asg
        result = False
        while True:
            if self.ev(f.right, cur, ctx):
                result = True
                break
            if not self.ev(f.left, cur, ctx):
                break
            visited.append(self.key(f, cur))
            sig = self.fold(cur)
            n = seen.get(sig, 0)
            if n >= repeats:
                break
            seen[sig] = n + 1
            cur = self.succ(cur, f.gamma, ctx)
        for sig in visited:
            self.memo[(id(f), sig, ctx)] = result
        return result

    def since(self, f, asg, ctx) -> bool:
        cur = asg
        if not any(_moves(v, ctx) for v, _, _ in asg):
            return self.ev(f.right, asg, ctx)
        while cur is not None:
            if self.ev(f.right, cur, ctx):
                return True
            if not self.ev(f.left, cur, ctx):
                return False
            cur = self.pred(cur, f.gamma, ctx)
        return False

    # -- quantifier blocks -------------------------------------------------

    def negated(self, f):
        if isinstance(f, Not):
            return f.arg
        k = ("not", id(f))
        g = self.keep.get(k)
        if g is None:
            g = self.keep[k] = Not(f)
            self.keep[("src", id(f))] = f
        return g

    def block(self, f):
        """Split a quantifier chain of one polarity into (vars, existential body)."""
        k = ("block", id(f))
        b = self.keep.get(k)
        if b is not None:
            return b
        kind = type(f)
        vs, g = [], f
        while isinstance(g, kind) and g.var not in vs:
            vs.append(g.var)
            g = g.arg
        body = g if kind is Exists else self.negated(g)
        conjs = []
        _flatten_conj(body, conjs)
        ready = []
        for c in conjs:
            past_free, fv = self.node_info(c)
            need = [v for v in vs if v in fv] if past_free else list(vs)
            ready.append((max((vs.index(v) for v in need), default=-1), c))
        b = self.keep[k] = (vs, ready)
        return b

    def quantifier_block(self, f, asg, ctx):
        """Satisfying binding tuple for the existential reading of ``f``, or None."""
        vs, ready = self.block(f)
        by_level: dict = {}
        for lvl, c in ready:
            by_level.setdefault(lvl, []).append(c)
        base = asg
        if any(not self.ev(c, base, ctx) for c in by_level.get(-1, ())):
            return None

        def search(i, cur, chosen):
            if i == len(vs):
                return chosen
            for tid in self.pool:
                nxt = self.bind(cur, vs[i], tid)
                if all(self.ev(c, nxt, ctx) for c in by_level.get(i, ())):
                    r = search(i + 1, nxt, chosen + (tid,))
                    if r is not None:
                        return r
            return None

        if not self.pool:
            raise EvaluationError("empty trace set")
        found = search(0, base, ())
        return None if found is None else tuple(zip(vs, found))


def _walk(f):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def _flatten_conj(f, out):
    if isinstance(f, Not) and isinstance(f.arg, Not):
        _flatten_conj(f.arg.arg, out)
    elif isinstance(f, Not) and isinstance(f.arg, Or):
        for side in (f.arg.left, f.arg.right):
            if isinstance(side, Not):
                _flatten_conj(side.arg, out)
            else:
                out.append(Not(side))
    else:
        out.append(f)


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------


def _assignment(ev: _Evaluator, a: Mapping, f) -> tuple:
    asg = []
    for x, pt in (a or {}).items():
        if isinstance(pt, tuple) and not isinstance(pt, PointedTrace):
            pt = PointedTrace(*pt)
        asg.append((x, ev.register(pt.trace), pt.position))
    asg.sort()
    missing = free_vars(f) - {x for x, _, _ in asg}
    if missing:
        raise EvaluationError(f"unbound trace variables: {', '.join(sorted(missing))}")
    return tuple(asg)


def _names_by_id(ev: _Evaluator, l: TraceSet) -> dict:
    return {ev.tid[t]: n for n, t in reversed(list(l.items()))}


def _prepare(l: Optional[TraceSet], a: Mapping, f):
    ev = _Evaluator(list(l.values()) if l is not None else [], f)
    return ev, _assignment(ev, a, f)


def eval_qf(a: Mapping[str, PointedTrace], c: Context, f) -> bool:
    """Truth of a quantifier-free formula; no trace set involved."""
    if any(isinstance(g, (Exists, Forall)) for g in _walk(f)):
        raise EvaluationError("formula is not quantifier-free")
    ev, asg = _prepare(None, a, f)
    return ev.ev(f, asg, _ctx(c))


def evaluate(l: TraceSet, a: Mapping[str, PointedTrace], c: Context, f) -> bool:
    if not l:
        raise EvaluationError("empty trace set")
    ev, asg = _prepare(l, a, f)
    return ev.ev(f, asg, _ctx(c))


def check_traceset(l: TraceSet, sentence) -> bool:
    if not is_sentence(sentence):
        raise EvaluationError("formula has free trace variables")
    return evaluate(l, {}, UNIVERSAL, sentence)


def witness(l: TraceSet, a: Mapping[str, PointedTrace], c: Context, f) -> Optional[dict]:
    """For ``f = E x1. ... E xn. body``, a satisfying choice var -> trace name."""
    if not isinstance(f, Exists):
        raise EvaluationError("witness needs an existential formula")
    if not l:
        raise EvaluationError("empty trace set")
    ev, asg = _prepare(l, a, f)
    found = ev.quantifier_block(f, asg, _ctx(c))
    if found is None:
        return None
    names = _names_by_id(ev, l)
    return {v: names[tid] for v, tid in found}


class Model:
    """A trace set prepared for many queries that share memoized results.

    All stutter labels used by later queries must occur in ``formulas``.
    """

    def __init__(self, l: TraceSet, formulas=()):
        if not l:
            raise EvaluationError("empty trace set")
        self._ev = _Evaluator(list(l.values()), *formulas)
        self.names = _names_by_id(self._ev, l)
        self._labels = set(self._ev.gammas)

    def _check(self, f):
        extra = labels(f) - self._labels
        if extra:
            raise EvaluationError("formula uses stutter labels unknown to this model")

    def holds(self, f, a: Mapping = None, c: Context = UNIVERSAL) -> bool:
        self._check(f)
        return self._ev.ev(f, _assignment(self._ev, a or {}, f), _ctx(c))

    def witness(self, f, a: Mapping = None, c: Context = UNIVERSAL) -> Optional[dict]:
        if not isinstance(f, Exists):
            raise EvaluationError("witness needs an existential formula")
        self._check(f)
        found = self._ev.quantifier_block(f, _assignment(self._ev, a or {}, f), _ctx(c))
        if found is None:
            return None
        return {v: self.names[tid] for v, tid in found}


@dataclass(frozen=True)
class BoundedVerdict:
    holds: bool
    pool_size: int
    prefix_bound: int
    loop_bound: int

    @property
    def label(self) -> str:
        word = "holds" if self.holds else "fails"
        return f"{word} on bounded fragment (prefix<={self.prefix_bound}, loop<={self.loop_bound})"


def check_system(ts: TransitionSystem, sentence, prefix_bound: int, loop_bound: int) -> BoundedVerdict:
    if not ts.initial:
        raise EvaluationError("transition system has no initial vertex")
    l = system_traces(ts, prefix_bound, loop_bound)
    return BoundedVerdict(check_traceset(l, sentence), len(l), prefix_bound, loop_bound)
