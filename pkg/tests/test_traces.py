import random
from math import lcm

import pytest
from hypothesis import given, settings

from gen import rand_trace, seeds, traces
from oracles import letters_equal
from hyperstutter.traces import (
    EMPTY_LETTER, LassoTrace, TraceSet, TransitionSystem, constant_trace, format_trace,
    format_trace_set, letter, letter_at, lasso_runs, parse_trace, parse_trace_set,
    parse_transition_system, pointwise_union, position_trace, system_traces,
)


def test_letter_at_examples():
    t = LassoTrace([letter(), letter("p")], [letter("q")])
    assert letter_at(t, 1) == {"p"}
    assert letter_at(t, 5) == {"q"}
    u = LassoTrace([], [letter("p"), letter()])
    assert letter_at(u, 3) == frozenset()


def test_empty_loop_rejected():
    with pytest.raises(ValueError):
        LassoTrace([letter("p")], [])


def test_position_trace():
    assert position_trace(0) == LassoTrace([letter("#")], [EMPTY_LETTER])
    assert position_trace(2) == LassoTrace([EMPTY_LETTER, EMPTY_LETTER, letter("#")], [EMPTY_LETTER])
    for i in range(6):
        t = position_trace(i)
        assert all(("#" in t.letter_at(j)) == (j == i) for j in range(20))
        for j in range(i):
            assert not letters_equal(t, position_trace(j))


def test_pointwise_union_examples():
    a = LassoTrace([letter("p")], [EMPTY_LETTER])
    b = LassoTrace([], [letter("q")])
    assert pointwise_union(a, b) == LassoTrace([letter("p", "q")], [letter("q")])
    c = LassoTrace([], [letter("p"), EMPTY_LETTER])
    d = LassoTrace([], [letter("q"), EMPTY_LETTER, letter("r")])
    u = pointwise_union(c, d)
    assert len(u.loop) == 6
    assert all(u.letter_at(i) == c.letter_at(i) | d.letter_at(i) for i in range(31))


@settings(max_examples=200, deadline=None)
@given(traces, traces)
def test_pointwise_union_letterwise(a, b):
    u = pointwise_union(a, b)
    assert len(u.prefix) == max(len(a.prefix), len(b.prefix))
    assert len(u.loop) == lcm(len(a.loop), len(b.loop))
    n = len(u.prefix) + 2 * len(u.loop)
    assert all(u.letter_at(i) == a.letter_at(i) | b.letter_at(i) for i in range(n))
    assert letters_equal(pointwise_union(a, constant_trace()), a)


@settings(max_examples=300, deadline=None)
@given(traces, traces)
def test_denotation_equality_matches_oracle(a, b):
    assert a.same_denotation(b) == letters_equal(a, b)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_rotated_lasso_same_denotation(s):
    rng = random.Random(s)
    t = rand_trace(rng)
    k = rng.randint(0, 4)
    unrolled = LassoTrace([t.letter_at(i) for i in range(len(t.prefix) + k)],
                          [t.letter_at(len(t.prefix) + k + i) for i in range(2 * len(t.loop))])
    assert unrolled.same_denotation(t)


def test_trace_text_round_trip():
    t = parse_trace("{p} {} | {q,p}")
    assert t == LassoTrace([letter("p"), EMPTY_LETTER], [letter("p", "q")])
    assert parse_trace(format_trace(t)) == t
    l = parse_trace_set("a = {p} | {}\n-- comment\nb = | {q} {}\n")
    assert list(l) == ["a", "b"]
    assert parse_trace_set(format_trace_set(l)) == l


@pytest.mark.parametrize("bad", ["{p} {q}", "{p | {q}", "| "])
def test_trace_text_errors(bad):
    with pytest.raises(ValueError):
        parse_trace(bad)


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        parse_trace_set("a = | {}\na = | {p}\n")


def test_union_renames_and_dedups():
    l = TraceSet([("a", parse_trace("| {p}"))])
    m = TraceSet([("a", parse_trace("| {q}")), ("b", parse_trace("{p} | {p}"))])
    u = l.union(m)
    assert list(u) == ["a", "a'"]


def test_single_vertex_system():
    ts = TransitionSystem({"v": letter("p")}, {"v": ["v"]}, ["v"])
    l = system_traces(ts, 2, 2)
    assert len(l) == 1
    assert l.traces()[0].same_denotation(LassoTrace([], [letter("p")]))


def _replay(ts, t, n=20):
    """Some run of ``ts`` produces ``t`` on its first ``n`` letters."""
    frontier = [v for v in ts.initial if ts.vertices[v] == t.letter_at(0)]
    for i in range(1, n):
        frontier = list({w for v in frontier for w in ts.edges[v] if ts.vertices[w] == t.letter_at(i)})
        if not frontier:
            return False
    return True


def test_two_vertex_system_exhaustive():
    ts = parse_transition_system("vertices:\n a {p}\n b {q}\nedges:\n a -> b\n b -> a\ninitial:\n a, b\n")
    l = system_traces(ts, 2, 2)
    got = {format_trace(t) for t in l.traces()}
    pq = LassoTrace([], [letter("p"), letter("q")])
    qp = LassoTrace([], [letter("q"), letter("p")])
    assert any(t.same_denotation(pq) for t in l.traces())
    assert any(t.same_denotation(qp) for t in l.traces())
    assert not any(t.same_denotation(LassoTrace([], [letter("p")])) for t in l.traces())
    assert len(got) == 2


def test_system_traces_replay():
    rng = random.Random(3)
    for _ in range(30):
        names = [f"v{i}" for i in range(rng.randint(1, 4))]
        verts = {v: frozenset(p for p in "pq" if rng.random() < 0.5) for v in names}
        edges = {v: rng.sample(names, rng.randint(1, len(names))) for v in names}
        ts = TransitionSystem(verts, edges, [names[0]])
        l = system_traces(ts, 3, 3)
        assert l
        for t in l.traces():
            assert _replay(ts, t)
        keys = [t.canonical_key() for t in l.traces()]
        assert len(keys) == len(set(keys))


def test_runs_respect_bounds():
    ts = TransitionSystem({"a": letter("p"), "b": letter()}, {"a": ["a", "b"], "b": ["a"]}, ["a"])
    for prefix, loop in lasso_runs(ts, 2, 3):
        assert len(prefix) <= 2 and 1 <= len(loop) <= 3


def test_system_validation():
    with pytest.raises(ValueError):
        parse_transition_system("vertices:\n a {p}\nedges:\ninitial:\n a\n")


def test_no_initial_vertex_gives_empty_set():
    ts = TransitionSystem({"v": letter("p")}, {"v": ["v"]}, [])
    assert len(system_traces(ts, 2, 2)) == 0
