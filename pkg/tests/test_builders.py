import random

import pytest

from mddkit import (DescriptorError, Gcs, MddError, NotDisjointError, TupleSequence, TupleTable,
                    build_from_disjoint_sequences, build_from_gcs, build_from_sorted_table,
                    build_from_tuple_sequence, build_from_tuples, build_trie, equivalent,
                    trie_to_mdd)
from mddkit.builders import gcs_tuples
from mddkit.oracle import o_gcs_expand, o_sequence_expand

from conftest import ABC_TUPLES, SLAB_GCS, universe


def random_sequence(rng, max_r=5, max_d=5):
    r = rng.randint(1, max_r)
    doms = tuple(rng.randint(1, max_d) for _ in range(r))
    sets = [sorted(rng.sample(range(d), rng.randint(1, d))) for d in doms]
    a = tuple(rng.choice(s) for s in sets)
    b = tuple(rng.choice(s) for s in sets)
    return TupleSequence(Gcs(doms, sets), min(a, b), max(a, b))


def test_trie_of_abc():
    trie = build_trie(TupleTable((3, 3), ABC_TUPLES))
    assert sorted(trie.children[trie.root]) == [0, 2]
    assert trie.n_leaves == 5
    assert list(trie.tuples()) == ABC_TUPLES


def test_trie_dedupes():
    assert build_trie(TupleTable((2, 2), [(1, 1), (1, 1)])).n_leaves == 1


def test_trie_leaf_count_random():
    rng = random.Random(1)
    rows = sorted(tuple(rng.randrange(4) for _ in range(6)) for _ in range(1000))
    trie = build_trie(TupleTable((4,) * 6, rows, is_sorted=True))
    assert trie.n_leaves == len(set(rows))


def test_trie_to_mdd(abc):
    assert equivalent(trie_to_mdd(build_trie(TupleTable((3, 3), ABC_TUPLES))), abc)
    chain = trie_to_mdd(build_trie(TupleTable((3, 3, 3), [(1, 0, 2)])))
    assert chain.n_arcs == 3
    full = trie_to_mdd(build_trie(TupleTable((2, 2), universe((2, 2)))))
    assert len(full.layers[1]) == 1


def test_sorted_flag_is_checked():
    with pytest.raises(MddError):
        build_from_sorted_table(TupleTable((2, 2), [(1, 0), (0, 0)], is_sorted=True))


def test_build_examples(abc):
    assert abc.count() == 5
    assert build_from_tuples((3, 3), []).is_empty()


def test_build_matches_trie_path_and_is_deterministic():
    rng = random.Random(2)
    for _ in range(100):
        r = rng.randint(1, 5)
        doms = tuple(rng.randint(1, 5) for _ in range(r))
        rows = [tuple(rng.randrange(d) for d in doms) for _ in range(rng.randint(0, 200))]
        t = TupleTable(doms, rows)
        a = build_from_sorted_table(t)
        assert a.dumps() == build_from_sorted_table(TupleTable(doms, rows)).dumps()
        assert a.dumps() == trie_to_mdd(build_trie(t)).dumps()


def test_gcs_examples():
    g = Gcs((5,) * 4, [(1, 2, 3, 4)] * 4)
    m = build_from_gcs(g)
    assert (m.n_nodes, m.n_arcs, m.count()) == (5, 16, 256)
    assert list(build_from_gcs(Gcs((3, 3), [(2,), (0,)])).iter_tuples()) == [(2, 0)]
    assert build_from_gcs(Gcs((4, 4, 4), SLAB_GCS)).count() == 4


def test_gcs_errors():
    with pytest.raises(DescriptorError):
        Gcs((3, 3), [(0,), ()])
    with pytest.raises(DescriptorError):
        Gcs((3, 3), [(0,), (3,)])
    with pytest.raises(DescriptorError):
        Gcs((3, 3), [(0,)])


def test_sample_sequence(sample_seq):
    m = build_from_tuple_sequence(sample_seq)
    for t in [(1, 2, 2, 2), (1, 2, 2, 3), (3, 1, 4, 1), (3, 1, 4, 2)]:
        assert m.contains(t)
    assert not m.contains((1, 2, 2, 1))
    assert not m.contains((3, 1, 4, 3))
    assert m.count() == 121
    ts = list(m.iter_tuples())
    assert ts[0] == (1, 2, 2, 2) and ts[-1] == (3, 1, 4, 2)


def test_degenerate_sequence():
    g = Gcs((3, 3, 3), [(0, 1, 2)] * 3)
    m = build_from_tuple_sequence(TupleSequence(g, (1, 0, 2), (1, 0, 2)))
    assert list(m.iter_tuples()) == [(1, 0, 2)]


def test_sequence_errors():
    g = Gcs((3, 3), [(0, 1), (0, 2)])
    with pytest.raises(DescriptorError):
        TupleSequence(g, (1, 0), (0, 2))
    with pytest.raises(DescriptorError):
        TupleSequence(g, (0, 1), (1, 2))
    with pytest.raises(DescriptorError):
        TupleSequence(g, (0, 0, 0), (1, 2))


def test_sequence_semantics_and_node_bound():
    rng = random.Random(3)
    for _ in range(300):
        s = random_sequence(rng)
        r = len(s.domains)
        raw = build_from_tuple_sequence(s, reduce=False)
        assert raw.n_nodes <= 3 * (r - 1) + 2
        # each of the three per-layer nodes emits at most |val[i]| arcs
        assert raw.n_arcs <= 3 * sum(len(v) for v in s.gcs.sets)
        m = build_from_tuple_sequence(s)
        expect = o_sequence_expand(s.domains, s.gcs.sets, s.tmin, s.tmax)
        assert list(m.iter_tuples()) == list(expect.tuples)
        assert list(raw.iter_tuples()) == list(expect.tuples)


def test_gcs_equals_full_range_sequence():
    rng = random.Random(4)
    for _ in range(100):
        s = random_sequence(rng)
        assert equivalent(build_from_gcs(s.gcs), build_from_tuple_sequence(TupleSequence.from_gcs(s.gcs)))
        assert sorted(gcs_tuples(s.gcs)) == list(o_gcs_expand(s.domains, s.gcs.sets).tuples)


def _slices(rng, domains, k):
    """k disjoint lexicographic slices of the full product."""
    u = universe(domains)
    cuts = sorted(rng.sample(range(1, len(u)), k - 1))
    bounds = [0] + cuts + [len(u)]
    g = Gcs(domains, [range(d) for d in domains])
    return [TupleSequence(g, u[a], u[b - 1]) for a, b in zip(bounds, bounds[1:])]


def test_disjoint_sequences():
    g = Gcs((2, 2), [(0, 1), (0, 1)])
    two = [TupleSequence(g, (0, 0), (0, 0)), TupleSequence(g, (1, 1), (1, 1))]
    assert build_from_disjoint_sequences(two).count() == 2
    s = TupleSequence(g, (0, 1), (1, 1))
    assert equivalent(build_from_disjoint_sequences([s]), build_from_tuple_sequence(s))
    rng = random.Random(5)
    for _ in range(20):
        seqs = _slices(rng, (5, 5, 5, 5), 5)
        m = build_from_disjoint_sequences(seqs, check=True)
        want = set()
        for q in seqs:
            want |= set(o_sequence_expand(q.domains, q.gcs.sets, q.tmin, q.tmax).tuples)
        assert set(m.iter_tuples()) == want


def test_disjoint_merge_keeps_arc_total():
    g = Gcs((3, 3, 3), [(0, 1, 2)] * 3)
    seqs = [TupleSequence(g, (0, 0, 1), (0, 2, 2)), TupleSequence(g, (1, 0, 0), (2, 1, 1))]
    raw = build_from_disjoint_sequences(seqs, reduce=False)
    assert raw.n_arcs == sum(build_from_tuple_sequence(s, reduce=False).n_arcs for s in seqs)


def test_overlap_detected():
    g = Gcs((2, 2), [(0, 1), (0, 1)])
    seqs = [TupleSequence(g, (0, 0), (1, 0)), TupleSequence(g, (0, 1), (1, 1))]
    with pytest.raises(NotDisjointError):
        build_from_disjoint_sequences(seqs, check=True)
