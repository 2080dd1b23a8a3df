import random

import pytest

from mddkit import (Mdd, ParseError, ScopeError, TupleTable, build_from_tuples, complement,
                    equivalent, full_mdd, tuple_mdd, validate)
from mddkit.core import RawMdd, count_tuples, loads
from mddkit.oracle import ExplicitSet, o_complement

from conftest import ABC_TUPLES, universe


def random_mdd(rng, max_r=6, max_d=5, max_rows=300):
    r = rng.randint(1, max_r)
    doms = tuple(rng.randint(1, max_d) for _ in range(r))
    rows = [tuple(rng.randrange(d) for d in doms) for _ in range(rng.randint(0, max_rows))]
    return doms, rows, build_from_tuples(doms, rows)


def test_abc_membership(abc):
    assert abc.contains((0, 0))
    assert abc.contains((2, 2))
    assert not abc.contains((1, 0))
    assert (0, 1) in abc


def test_contains_rejects_bad_tuples(abc):
    with pytest.raises(ScopeError):
        abc.contains((0, 0, 0))
    with pytest.raises(ScopeError):
        abc.contains((0, 3))


def test_empty_mdd_contains_nothing():
    m = Mdd((2, 2))
    assert m.is_empty()
    assert not m.contains((0, 0))
    assert count_tuples(m) == 0


def test_counts(abc, cube_minus_slab):
    assert count_tuples(abc) == 5
    assert count_tuples(full_mdd((4, 4, 4))) == 64
    assert count_tuples(cube_minus_slab) == 60


def test_enumerate_abc(abc):
    assert abc.enumerate().rows == ABC_TUPLES
    assert list(tuple_mdd((3, 3, 3), (1, 2, 1)).iter_tuples()) == [(1, 2, 1)]


def test_enumerate_round_trip_50_rows():
    rng = random.Random(5)
    doms = (4, 3, 5)
    rows = [tuple(rng.randrange(d) for d in doms) for _ in range(50)]
    assert build_from_tuples(doms, rows).enumerate().rows == sorted(set(rows))


def test_reduce_idempotent_and_semantic():
    rng = random.Random(11)
    for _ in range(500):
        doms, rows, m = random_mdd(rng)
        once = m.dumps()
        m.reduce()
        assert m.dumps() == once
        assert list(m.iter_tuples()) == sorted(set(rows))


def test_reduced_signatures_distinct():
    rng = random.Random(12)
    for _ in range(100):
        _, _, m = random_mdd(rng)
        for lay in range(1, m.r):
            sigs = [m.signature(n) for n in m.layers[lay]]
            assert len(sigs) == len(set(sigs))


def test_reduce_never_grows():
    # an unreduced copy of the full product: d separate subtrees per layer
    m = Mdd((2, 2, 2))
    for a in range(2):
        x = m.new_node(1)
        m.add_arc(m.root, a, x)
        for b in range(2):
            y = m.new_node(2)
            m.add_arc(x, b, y)
            for c in range(2):
                m.add_arc(y, c, m.tt)
    n0, a0 = m.n_nodes, m.n_arcs
    m.reduce()
    assert m.n_nodes <= n0 and m.n_arcs <= a0
    assert (m.n_nodes, m.n_arcs) == (4, 6)
    assert m.count() == 8


def test_complement_examples(abc):
    assert complement(full_mdd((4, 4, 4))).is_empty()
    full = complement(Mdd((4, 4, 4)))
    assert full.count() == 64
    assert full.n_nodes == 4
    assert list(complement(abc).iter_tuples()) == [(0, 2), (1, 0), (1, 1), (1, 2)]


def test_complement_matches_oracle_and_is_involution():
    rng = random.Random(13)
    for _ in range(200):
        doms, rows, m = random_mdd(rng, max_r=4, max_d=4, max_rows=40)
        c = complement(m)
        assert list(c.iter_tuples()) == list(o_complement(ExplicitSet.of(doms, rows)).tuples)
        assert equivalent(complement(c), m)


def test_contains_iff_enumerated():
    rng = random.Random(14)
    for _ in range(100):
        doms, rows, m = random_mdd(rng, max_r=4, max_d=4, max_rows=30)
        got = set(m.iter_tuples())
        assert m.count() == len(got)
        for t in universe(doms):
            assert m.contains(t) == (t in got)


def test_equivalent(abc):
    assert equivalent(abc, abc)
    smaller = abc.copy()
    smaller.remove_arc(smaller.root, 0)
    assert not equivalent(abc, smaller)
    with pytest.raises(ScopeError):
        equivalent(abc, full_mdd((3, 4)))


def test_validate(abc):
    assert validate(abc).ok
    raw = RawMdd((2, 2), {0: 0, 1: 2, 2: 1, 3: 1}, [(0, 0, 2), (0, 1, 3), (2, 0, 1)])
    report = validate(raw)
    assert not report
    assert any("node without outgoing arc" in v for v in report.violations)
    raw = RawMdd((2, 2), {0: 0, 1: 2, 2: 1}, [(0, 0, 2), (2, 0, 1), (2, 0, 1)])
    assert any("nondeterministic node" in v for v in validate(raw).violations)


def test_serialization_round_trip(abc):
    text = abc.dumps()
    assert text.splitlines()[:2] == ["mdd 1 2", "domains 3 3"]
    assert loads(text).dumps() == text
    rng = random.Random(15)
    for _ in range(100):
        _, _, m = random_mdd(rng)
        assert loads(m.dumps()).dumps() == m.dumps()


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as e:
        loads("mdd 1 2\ndomains 3 3\nnode 0 0\nbogus 1\n")
    assert e.value.line == 4


def test_scope_validation():
    with pytest.raises(ScopeError):
        Mdd(())
    with pytest.raises(ScopeError):
        TupleTable((2, 0))
    with pytest.raises(ScopeError):
        TupleTable((2, 2), [(0, 2)])
