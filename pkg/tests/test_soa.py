import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import SOA
from gen import seeds
from hyperstutter.soa import (
    Add, Eq, In, Less, Lt, Member, Mul, SExists, SForall, SNot, SOr, SAnd, SoaSyntaxError, TAdd,
    TMul, TVar, aux_bound, equal, eval_soa_bounded, first_order_vars, is_flat, normalize_flat,
    parse_soa, print_soa, separate_repeats, soa_free_vars, soa_walk,
)


def test_irreflexive():
    assert eval_soa_bounded(parse_soa("forall y. ~(y < y)"), 5)


@pytest.mark.parametrize("b", range(4))
def test_zero_is_additive_fixpoint(b):
    assert eval_soa_bounded(SExists("y", Add("y", "y", "y")), b)


def test_full_set_exists():
    assert eval_soa_bounded(parse_soa("exists Y. forall y. y in Y"), 3)
    assert not eval_soa_bounded(parse_soa("forall Y. exists y. y in Y"), 3)


def test_atoms_are_exact():
    env = {"a": 2, "b": 3, "c": 5, "d": 6, "S": frozenset({2})}
    assert eval_soa_bounded(Add("a", "b", "c"), 0, env)
    assert eval_soa_bounded(Mul("a", "b", "d"), 0, env)
    assert not eval_soa_bounded(Mul("a", "b", "c"), 0, env)
    assert eval_soa_bounded(Less("a", "b"), 0, env) and not eval_soa_bounded(Less("b", "a"), 0, env)
    assert eval_soa_bounded(Member("a", "S"), 0, env) and not eval_soa_bounded(Member("b", "S"), 0, env)


def test_free_variables_rejected():
    with pytest.raises(ValueError):
        eval_soa_bounded(parse_soa("y < z"), 3)


@pytest.mark.parametrize("b", range(1, 7))
def test_commutativity(b):
    f = parse_soa("forall y1. forall y2. exists t1. exists t2. "
                  "y1 + y2 = t1 & y2 + y1 = t2 & ~(t1 < t2) & ~(t2 < t1)")
    # the sums exceed b for large summands, so widen their range
    f = _rename(f, {"t1": "_s1", "t2": "_s2"})
    assert eval_soa_bounded(f, b)


def _rename(f, m):
    if isinstance(f, (Add, Mul)):
        return type(f)(*(m.get(v, v) for v in (f.a, f.b, f.c)))
    if isinstance(f, Less):
        return Less(m.get(f.a, f.a), m.get(f.b, f.b))
    if isinstance(f, SNot):
        return SNot(_rename(f.arg, m))
    if isinstance(f, SOr):
        return SOr(_rename(f.left, m), _rename(f.right, m))
    if isinstance(f, (SExists, SForall)):
        return type(f)(m.get(f.var, f.var), _rename(f.arg, m))
    return f


# -- parsing -----------------------------------------------------------------------

def test_parser_builds_flat_atoms():
    assert parse_soa("y1 + y2 = y3") == Add("y1", "y2", "y3")
    assert parse_soa("y1 * y2 = y3") == Mul("y1", "y2", "y3")
    assert parse_soa("y in Y") == Member("y", "Y")
    assert parse_soa("(y1 + y2) * y3 = y4") == Eq(TMul(TAdd(TVar("y1"), TVar("y2")), TVar("y3")), TVar("y4"))


@pytest.mark.parametrize("text", SOA)
def test_round_trip(text):
    f = parse_soa(text)
    assert parse_soa(print_soa(f)) == f


@pytest.mark.parametrize("text", ["exists y y < z", "y +", "(y < z", "y in 3", "forall . y < y", "y ? z"])
def test_syntax_errors(text):
    with pytest.raises(SoaSyntaxError):
        parse_soa(text)


def test_parenthesized_formula_and_term():
    assert parse_soa("(y < z) | (y + z) < w") == SOr(Less("y", "z"), Lt(TAdd(TVar("y"), TVar("z")), TVar("w")))


# -- flattening -------------------------------------------------------------------

def test_flatten_example():
    f = normalize_flat(parse_soa("(y1 + y2) * y3 = y4"))
    assert isinstance(f, SExists)
    t = f.var
    assert f.arg == SAnd(Add("y1", "y2", t), Mul(t, "y3", "y4"))
    assert is_flat(f)


def test_flat_input_unchanged():
    for text in SOA[:5]:
        f = parse_soa(text)
        assert normalize_flat(f) == f


def _count_compound(t):
    if isinstance(t, TVar):
        return 0
    return 1 + _count_compound(t.left) + _count_compound(t.right)


def test_one_fresh_variable_per_proper_compound_subterm():
    f = parse_soa("(y1 + y2) * (y3 * y4) < y1 * y2 + y3")
    g = normalize_flat(f)
    fresh = [h.var for h in soa_walk(g) if isinstance(h, SExists)]
    # both sides are compound, so each side is named too
    assert len(fresh) == _count_compound(f.left) + _count_compound(f.right)
    assert len(set(fresh)) == len(fresh) and all(v.startswith("_") for v in fresh)


NUMS = ["y1", "y2", "y3"]


def _term(rng, depth):
    if depth == 0 or rng.random() < 0.35:
        return TVar(rng.choice(NUMS))
    return (TAdd if rng.random() < 0.5 else TMul)(_term(rng, depth - 1), _term(rng, depth - 1))


def _max_value(t, b):
    if isinstance(t, TVar):
        return b
    l, r = _max_value(t.left, b), _max_value(t.right, b)
    return l + r if isinstance(t, TAdd) else l * r


def _atom(rng, b):
    """Random general atom whose subterms stay within the auxiliary range."""
    while True:
        kind = rng.choice(["eq", "lt", "in"])
        left, right = _term(rng, 2), _term(rng, 2)
        if max(_max_value(left, b), _max_value(right, b)) > aux_bound(b):
            continue
        if kind == "eq":
            return Eq(left, right)
        if kind == "lt":
            return Lt(left, right)
        return In(left, "Y")


def _close(f, rng):
    for v in sorted(soa_free_vars(f), key=lambda v: (v == "Y", v)):
        f = (SExists if rng.random() < 0.5 else SForall)(v, f)
    return f


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 5))
def test_flattening_keeps_bounded_truth(seed, b):
    rng = random.Random(seed)
    f = _atom(rng, b)
    if rng.random() < 0.5:
        f = SOr(SNot(f), _atom(rng, b))
    f = _close(f, rng)
    g = normalize_flat(f)
    assert is_flat(g)
    assert eval_soa_bounded(g, b) == eval_soa_bounded(f, b)


@pytest.mark.parametrize("text", ["(y1 + y2) * y3 = y4", "y1 * y2 + y3 < y4", "(y1 + y2) in Y"])
def test_flattening_at_bound_five(text):
    f = parse_soa(text)
    closed = f
    for v in sorted(soa_free_vars(f)):
        closed = SExists(v, closed)
    assert eval_soa_bounded(normalize_flat(closed), 5) == eval_soa_bounded(closed, 5)
    neg = SNot(normalize_flat(SNot(closed)))
    assert eval_soa_bounded(neg, 5) == eval_soa_bounded(closed, 5)


# -- other helpers ----------------------------------------------------------------

def _existential(rng, depth=2):
    if depth == 0:
        a, b, c = (rng.choice(["x", "y"]) for _ in range(3))
        return rng.choice([Add(a, b, c), Mul(a, b, c), Less(a, b), Member(a, "Y")])
    if rng.random() < 0.5:
        return SOr(_existential(rng, depth - 1), _existential(rng, depth - 1))
    return SAnd(_existential(rng, depth - 1), _existential(rng, depth - 1))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_existential_sentences_are_monotone(seed):
    rng = random.Random(seed)
    f = SExists("Y", SExists("x", SExists("y", _existential(rng))))
    truth = [eval_soa_bounded(f, b) for b in range(4)]
    assert truth == sorted(truth)


def test_separate_repeats():
    f = separate_repeats(SExists("y", Add("y", "y", "y")))
    assert all(len(set(_args(a))) == len(_args(a)) for a in soa_walk(f) if isinstance(a, (Add, Mul, Less)))
    assert eval_soa_bounded(f, 3)
    g = separate_repeats(SExists("y", Less("y", "y")))
    assert not eval_soa_bounded(g, 3)
    assert first_order_vars(g) == sorted(first_order_vars(g))


def _args(a):
    return (a.a, a.b) if isinstance(a, Less) else (a.a, a.b, a.c)


def test_equal_helper():
    env = {"a": 2, "b": 2, "c": 3}
    assert eval_soa_bounded(equal("a", "b"), 0, env)
    assert not eval_soa_bounded(equal("a", "c"), 0, env)
