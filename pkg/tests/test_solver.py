import random

import pytest

from mddkit import DescriptorError, Mdd, ScopeError, build_from_tuples
from mddkit.oracle import o_solve_all
from mddkit.solver import Constraint, Deletion, Problem, Search, single, solve_all, solve_one

from conftest import ABC_TUPLES, universe


def random_problem(rng, n_vars=6, d=4, n_cons=(1, 3), max_rows=3000, max_dels=100):
    ds = tuple(rng.randint(2, d) for _ in range(n_vars))
    cons, raw = [], []
    for _ in range(rng.randint(*n_cons)):
        vs = rng.sample(range(n_vars), rng.randint(2, n_vars))
        sub = tuple(ds[x] for x in vs)
        u = universe(sub)
        rows = rng.sample(u, min(max_rows, rng.randint(len(u) // 4, len(u))))
        cons.append(Constraint(vs, build_from_tuples(sub, rows)))
        raw.append((vs, rows))
    script, trig = [], 0
    for _ in range(rng.randint(0, max_dels)):
        trig += rng.randint(1, 4)
        ci = rng.randrange(len(cons))
        rows = raw[ci][1]
        script.append(Deletion(trig, ci, rng.sample(rows, min(len(rows), rng.randint(1, 3)))))
    return Problem(ds, cons, script), raw


def oracle(problem, raw):
    return o_solve_all(problem.domains, raw, [(d.trigger, d.constraint, d.tuples) for d in problem.script])


def test_abc_all(abc):
    res = solve_all(single(abc))
    assert res.count == 5
    assert res.solutions == ABC_TUPLES


def test_disjoint_constraints():
    a = build_from_tuples((3, 3), [(0, 0), (1, 1)])
    b = build_from_tuples((3, 3), [(0, 1), (2, 2)])
    p = Problem((3, 3), [Constraint((0, 1), a), Constraint((0, 1), b)])
    assert solve_all(p).count == 0
    assert solve_one(p) is None


def test_solve_one(abc):
    assert solve_one(single(abc)) == (0, 0)
    assert solve_one(single(Mdd((2, 2)))) is None


def test_solve_one_random_is_a_solution():
    rng = random.Random(1)
    for _ in range(20):
        p, raw = random_problem(rng, max_dels=0)
        sol = solve_one(p)
        if sol is None:
            assert solve_all(p).count == 0
            continue
        for c in p.constraints:
            assert c.mdd.contains(tuple(sol[x] for x in c.variables))


def test_random_with_script_matches_oracle():
    rng = random.Random(2)
    ds = (4,) * 6
    rows = rng.sample(universe(ds), 2000)
    dels = rng.sample(rows, 50)
    script = [Deletion(5 * i + 1, 0, [t]) for i, t in enumerate(dels)]
    p = single(build_from_tuples(ds, rows), script)
    want, nodes = o_solve_all(ds, [(range(6), rows)], [(d.trigger, 0, d.tuples) for d in script])
    res = solve_all(p, instrumented=True)
    assert res.solutions == want
    assert res.stats.nodes_visited == nodes


@pytest.mark.parametrize("backend", ["mdd", "table"])
def test_oracle_equivalence_small(backend):
    rng = random.Random(3)
    for _ in range(30):
        p, raw = random_problem(rng, n_vars=5, max_rows=200, max_dels=20)
        want, nodes = oracle(p, raw)
        res = solve_all(p, backend=backend, instrumented=True)
        assert res.solutions == want
        assert res.stats.nodes_visited == nodes


def test_determinism():
    rng = random.Random(4)
    p, _ = random_problem(rng, max_rows=500, max_dels=30)
    a, b = solve_all(p), solve_all(p)
    assert a.solutions == b.solutions
    sa, sb = a.stats.as_dict(), b.stats.as_dict()
    sa.pop("seconds"), sb.pop("seconds")
    assert sa == sb


def test_solutions_after_deletion_avoid_deleted_tuples():
    rng = random.Random(5)
    ds = (3,) * 4
    rows = universe(ds)
    dels = rng.sample(rows, 30)
    p = single(build_from_tuples(ds, rows), [Deletion(i + 1, 0, [t]) for i, t in enumerate(dels)])
    search = Search(p, instrumented=True)
    search.run()
    gone = set()
    for event in search.trace:
        if event[0] == "delete":
            gone.update(event[2])
        else:
            assert event[1] not in gone
    assert gone


def test_problem_validation(abc):
    with pytest.raises(ScopeError):
        Problem((3, 3), [Constraint((0, 2), abc)])
    with pytest.raises(ScopeError):
        Problem((3, 3), [Constraint((0,), abc)])
    with pytest.raises(DescriptorError):
        single(abc, [Deletion(3, 0, [(0, 0)]), Deletion(3, 0, [(0, 1)])])
    with pytest.raises(DescriptorError):
        single(abc, [Deletion(1, 1, [(0, 0)])])
    with pytest.raises(ScopeError):
        single(abc, [Deletion(1, 0, [(0, 5)])])
