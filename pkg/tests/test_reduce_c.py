import random

import pytest

from gen import rand_qf, rand_trace
from oracles import naive_horizon
from hyperstutter.hyper import Model, assign_succ, eval_qf
from hyperstutter.logic import (
    EMPTY, HYPERLTL_C, And, Exists, F, InContext, classify_fragment, is_past_free, labels, walk,
)
from hyperstutter.pnf import prenex_boolean
from hyperstutter.reduce_c import (
    DOLLAR, MARK, ReductionError, add_gadget, block_trace, hyp_atom_c, hyp_c, minimal_z,
    model_check_c, number_guard, number_trace, ordered_guard, ordered_product, period_of,
    periodic_pair, pool_c, product_witness, set_trace, trace_var, unit_case, verify_gadgets_c,
    zero_case,
)
from hyperstutter.soa import Add, Mul, parse_soa
from hyperstutter.traces import PointedTrace

YS = ("y1", "y2", "y3")


def _nums(**vals):
    return {trace_var(y): PointedTrace(number_trace(n), 0) for y, n in vals.items()}


# -- syntax ----------------------------------------------------------------------------

def test_add_clause_shape():
    f = add_gadget(*YS)
    assert isinstance(f, InContext) and f.vars == {"x_y1", "x_y3"}
    inner = [g for g in walk(f.arg) if isinstance(g, InContext)]
    assert inner[0].vars == {"x_y2", "x_y3"}
    assert hyp_atom_c(Add(*YS)) == f


def test_mul_has_four_cases_and_two_period_pairs():
    f = hyp_atom_c(Mul(*YS))
    text = repr(f)
    bound = {g.var for g in walk(f) if isinstance(g, Exists)}
    assert bound == {"p1", "p1'", "q1", "q1'", "p2", "p2'", "q2", "q2'"}
    assert repr(zero_case(*YS)) in text and repr(unit_case(*YS)) in text
    # the ordered case instantiates the periodic pair twice
    body = ordered_product("y1", "y2", "y3", ("a", "a'", "b", "b'"))
    assert repr(periodic_pair("a", "a'")) in repr(body) and repr(periodic_pair("b", "b'")) in repr(body)


def test_output_is_context_fragment():
    f = parse_soa("forall y1. forall y2. exists y3. exists Y. y1 + y2 = y3 & y1 * y2 = y3 & y3 in Y")
    h = hyp_c(f)
    assert labels(h) == {EMPTY} and is_past_free(h)
    assert classify_fragment(prenex_boolean(h)).label == HYPERLTL_C


def test_non_flat_rejected():
    with pytest.raises(ReductionError):
        hyp_c(parse_soa("exists y. y * y < y"))


# -- minimal z ---------------------------------------------------------------------------

def _search_z(n1, n2, limit=50):
    for z in range(1, limit + 1):
        for zp in range(1, limit + 2):
            if z * (n2 - 1) == zp * n2 - n1:
                return z
    return None


def test_minimal_z_examples():
    assert minimal_z(3, 7) == 3 and 3 * 6 == 3 * 7 - 3
    assert minimal_z(1, 2) == 1


def test_minimal_z_exhaustive():
    for n2 in range(2, 13):
        for n1 in range(1, n2 + 1):
            assert minimal_z(n1, n2) == _search_z(n1, n2) == n1


@pytest.mark.parametrize("n1,n2", [(0, 3), (4, 3), (1, 1), (-1, 2)])
def test_minimal_z_precondition(n1, n2):
    with pytest.raises(ValueError):
        minimal_z(n1, n2)


# -- pool ---------------------------------------------------------------------------------

def test_pool_contents():
    l = pool_c(3)
    traces = list(l.values())
    assert block_trace(1, 1) in traces and block_trace(4, 4) in traces
    assert number_trace(12) in traces and number_trace(13) not in traces
    props = set().union(*(t.props() for t in traces))
    assert props == {MARK, DOLLAR}
    assert all(period_of(t) for n, t in l.items() if n.startswith("per_"))


def test_pool_number_bound():
    l = pool_c(3, number_bound=3)
    assert sum(n.startswith("num_") for n in l) == 4
    assert set_trace([1]) in list(l.values())  # the singleton set doubles as a number
    with pytest.raises(ValueError):
        pool_c(1)


def test_numbers_pass_guard_sets_do_not():
    for n in range(5):
        assert eval_qf({"x": PointedTrace(number_trace(n), 0)}, None, number_guard("x"))
    assert not eval_qf({"x": PointedTrace(set_trace([0, 2]), 0)}, None, number_guard("x"))
    assert not eval_qf({"x": PointedTrace(block_trace(1, 1), 0)}, None, number_guard("x"))


# -- gadgets -----------------------------------------------------------------------------

def test_periodic_pair_selectivity():
    for on in range(1, 5):
        for off in range(1, 5):
            for on2 in range(1, 5):
                a = {"x": PointedTrace(block_trace(on, off), 0), "x'": PointedTrace(block_trace(on2, on2), 0)}
                assert eval_qf(a, None, periodic_pair("x", "x'")) == (on == off == on2)


@pytest.fixture(scope="module")
def model7():
    f = hyp_atom_c(Mul(*YS))
    return f, Model(pool_c(7), [f])


def test_three_times_seven(model7):
    f, m = model7
    assert {n3 for n3 in range(30) if m.holds(f, _nums(y1=3, y2=7, y3=n3))} == {21}
    assert m.holds(f, _nums(y1=7, y2=3, y3=21))


def test_product_witness_periods():
    w = product_witness(3, 7)
    assert (w["x0_period"], w["x1_period"]) == (7, 6)


def test_unit_and_false_products(model7):
    f, m = model7
    assert eval_qf(_nums(y1=1, y2=1, y3=1), None, unit_case(*YS))
    assert m.holds(f, _nums(y1=1, y2=1, y3=1))
    assert not m.holds(f, _nums(y1=2, y2=3, y3=7))


def test_case_partition():
    """Each grid cell is covered by some case and no case accepts a wrong product."""
    b = 4
    cases = {
        "zero": zero_case(*YS),
        "unit": unit_case(*YS),
        "ordered": And(ordered_guard("y1", "y2"), ordered_product("y1", "y2", "y3", ("a", "a'", "b", "b'"))),
        "swapped": And(ordered_guard("y2", "y1"), ordered_product("y2", "y1", "y3", ("c", "c'", "d", "d'"))),
    }
    m = Model(pool_c(b), list(cases.values()))
    for n1 in range(b + 1):
        for n2 in range(b + 1):
            hits = {k for k, f in cases.items() if m.holds(f, _nums(y1=n1, y2=n2, y3=n1 * n2))}
            assert hits, (n1, n2)
            for n3 in range(b * b + 1):
                if n3 != n1 * n2:
                    assert not any(m.holds(f, _nums(y1=n1, y2=n2, y3=n3)) for f in cases.values())
            if 0 < n1 <= n2 and n2 >= 2:
                assert "ordered" in hits
            if 0 < n2 <= n1 and n1 >= 2:
                assert "swapped" in hits


def test_gadget_grid_small():
    rep = verify_gadgets_c(3)
    assert rep.ok, rep.text()
    fams = rep.summary()["families"]
    assert fams["add"]["total"] == 16 and fams["periodicity"]["total"] == 256


# -- contexts -------------------------------------------------------------------------

def test_context_advance_law():
    """``<a,c> F phi`` looks only at assignments where ``a`` and ``c`` moved together."""
    rng = random.Random(8)
    ctx = frozenset({"a", "c"})
    for _ in range(150):
        phi = rand_qf(rng, ("a", "b", "c"), depth=2, ctx_budget=0, past=False)
        asg = {v: PointedTrace(rand_trace(rng, 3, 3, ("p", "q")), rng.randint(0, 2)) for v in "abc"}
        expected, cur = False, asg
        for _ in range(naive_horizon([pt.trace for pt in asg.values()])):
            if eval_qf(cur, ctx, phi):
                expected = True
                break
            nxt = assign_succ(cur, EMPTY, ctx)
            assert nxt["b"] == asg["b"]
            cur = nxt
        assert eval_qf(asg, None, InContext(ctx, F(phi))) == expected


# -- whole sentences -------------------------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    ("forall y. exists z. y < z", False),
    ("exists y1. exists y2. y1 * y2 = y2 & y1 < y2", True),
    ("forall y1. forall y2. exists y3. y1 + y2 = y3", False),
    ("exists Y. forall y. ~(y in Y)", True),
])
def test_sentences(text, expected):
    assert model_check_c(parse_soa(text), 3) == expected
