import random

import pytest

from mddkit import (Gcs, Mdd, ScopeError, add_set, add_tuple, build_from_gcs, build_from_tuples,
                    complement, delete_set, delete_tuple, duality_check, equivalent, full_mdd,
                    incremental_reduce, tuple_mdd, validate)
from mddkit.editops import IsolationFrontier
from mddkit.oracle import ExplicitSet, o_difference, o_union

from conftest import SLAB_GCS, universe


def random_pair(rng, max_r=5, max_d=4, max_rows=120):
    r = rng.randint(1, max_r)
    doms = tuple(rng.randint(1, max_d) for _ in range(r))

    def rows():
        return [tuple(rng.randrange(d) for d in doms) for _ in range(rng.randint(0, max_rows))]
    return doms, rows(), rows()


def test_single_deletion_isolates_path():
    m = full_mdd((2, 2, 2))
    s = delete_tuple(m, (0, 0, 0))
    assert s.nodes_created >= 2          # isolated copies on layers 1 and 2
    assert s.frontier_size == 2
    assert m.count() == 7 and not m.contains((0, 0, 0))
    assert validate(m).ok and m.is_reduced


def test_cube_minus_slab(cube_minus_slab):
    assert cube_minus_slab.count() == 60
    gone = set(universe((4, 4, 4))) - set(cube_minus_slab.iter_tuples())
    assert gone == {(1, b, 1) for b in range(4)}


def test_add_back_one_tuple(cube_minus_slab):
    s = add_tuple(cube_minus_slab, (1, 2, 1))
    assert cube_minus_slab.count() == 61
    assert s.nodes_deleted >= 1          # the isolated node merges back
    direct = build_from_tuples((4, 4, 4), set(universe((4, 4, 4))) - {(1, b, 1) for b in (0, 1, 3)})
    assert cube_minus_slab.dumps() == direct.dumps()


def test_add_back_via_add_set(cube_minus_slab):
    add_set(cube_minus_slab, tuple_mdd((4, 4, 4), (1, 2, 1)))
    assert cube_minus_slab.count() == 61


def test_trivial_sets(abc):
    before = abc.dumps()
    delete_set(abc, Mdd((3, 3)))
    assert abc.dumps() == before
    add_set(abc, Mdd((3, 3)))
    assert abc.dumps() == before
    m = abc.copy()
    delete_set(m, m)
    assert m.is_empty()
    add_set(abc, complement(abc))
    assert equivalent(abc, full_mdd((3, 3)))


def test_single_tuple_trivia():
    m = tuple_mdd((3, 3, 3), (2, 0, 1))
    delete_tuple(m, (2, 0, 1))
    assert m.is_empty()
    add_tuple(m, (1, 1, 1))
    assert m.dumps() == tuple_mdd((3, 3, 3), (1, 1, 1)).dumps()


def test_single_tuple_on_500_tuple_mdd():
    rng = random.Random(7)
    doms = (5, 5, 5, 5, 5)
    rows = rng.sample(universe(doms), 500)
    m = build_from_tuples(doms, rows)
    delete_tuple(m, rows[17])
    assert m.count() == 499
    assert list(m.iter_tuples()) == sorted(set(rows) - {rows[17]})
    absent = next(t for t in universe(doms) if t not in set(rows))
    m = build_from_tuples(doms, rows)
    add_tuple(m, absent)
    assert list(m.iter_tuples()) == sorted(set(rows) | {absent})


@pytest.mark.parametrize("op,oracle", [(delete_set, o_difference), (add_set, o_union)])
def test_set_ops_match_oracle(op, oracle):
    rng = random.Random(8)
    for _ in range(500):
        doms, a, b = random_pair(rng)
        m = build_from_tuples(doms, a)
        op(m, build_from_tuples(doms, b))
        assert list(m.iter_tuples()) == list(oracle(ExplicitSet.of(doms, a), ExplicitSet.of(doms, b)).tuples)
        assert validate(m).ok


def test_scope_mismatch(abc):
    with pytest.raises(ScopeError):
        delete_set(abc, full_mdd((3, 4)))
    with pytest.raises(ScopeError):
        add_set(abc, full_mdd((3, 3, 3)))


def test_duality():
    assert duality_check(build_from_tuples((3, 3), [(0, 0), (0, 1), (2, 0), (2, 1), (2, 2)]),
                         tuple_mdd((3, 3), (1, 0)))
    assert duality_check(full_mdd((2, 2)), Mdd((2, 2)))
    rng = random.Random(9)
    u = universe((4, 4, 4, 4))
    for _ in range(100):
        m = build_from_tuples((4,) * 4, rng.sample(u, rng.randint(0, 200)))
        t = build_from_tuples((4,) * 4, rng.sample(u, rng.randint(0, 50)))
        assert duality_check(m, t)


def test_noop_and_inverse():
    rng = random.Random(10)
    for _ in range(200):
        doms, a, _ = random_pair(rng)
        m = build_from_tuples(doms, a)
        before = m.dumps()
        t = tuple(rng.randrange(d) for d in doms)
        if m.contains(t):
            assert not add_tuple(m, t).changed
            assert m.dumps() == before
            delete_tuple(m, t)
            add_tuple(m, t)
        else:
            assert not delete_tuple(m, t).changed
            assert m.dumps() == before
            add_tuple(m, t)
            delete_tuple(m, t)
        assert m.dumps() == before


def test_incremental_equals_full_reduce_and_locality():
    rng = random.Random(11)
    for k in range(300):
        doms, a, b = random_pair(rng, max_r=6, max_d=5, max_rows=400)
        r, d = len(doms), max(doms)
        m = build_from_tuples(doms, a)
        if k % 3:
            t = tuple(rng.randrange(x) for x in doms)
            s = delete_tuple(m, t) if m.contains(t) else add_tuple(m, t)
            assert s.nodes_created <= r
            assert s.arcs_created + s.arcs_deleted <= 4 * r * d
        else:
            (delete_set if k % 2 else add_set)(m, build_from_tuples(doms, b))
        assert m.dumps() == m.copy().reduce().dumps()


def test_incremental_reduce_empty_frontier(abc):
    before = abc.dumps()
    assert incremental_reduce(abc, IsolationFrontier.for_arity(abc.r)) == 0
    assert abc.dumps() == before


def test_gcs_deletion_removes_exactly_the_gcs():
    m = full_mdd((4, 4, 4))
    g = build_from_gcs(Gcs((4, 4, 4), SLAB_GCS))
    delete_set(m, g)
    assert not any(m.contains(t) for t in g.iter_tuples())
