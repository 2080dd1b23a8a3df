"""Backtracking search over MDD (or table) constraints with scripted
persistent deletions."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .core import DescriptorError, Mdd, MddError, Scope, ScopeError
from .propagation import Counters, MddPropagator, TablePropagator
from .sparse import DomainStore


class PersistenceViolation(MddError):
    pass


@dataclass
class Constraint:
    variables: tuple[int, ...]
    mdd: Mdd

    def __post_init__(self):
        self.variables = tuple(self.variables)


@dataclass
class Deletion:
    """Delete ``tuples`` from constraint ``constraint`` once ``trigger``
    search nodes have been visited."""

    trigger: int
    constraint: int
    tuples: list[tuple[int, ...]]


@dataclass
class Problem:
    domains: tuple[int, ...]
    constraints: list[Constraint] = field(default_factory=list)
    script: list[Deletion] = field(default_factory=list)

    def __post_init__(self):
        self.domains = tuple(self.domains)
        Scope(self.domains)
        self.validate()

    def validate(self) -> None:
        n = len(self.domains)
        for ci, c in enumerate(self.constraints):
            if len(c.variables) != c.mdd.r:
                raise ScopeError(f"constraint {ci}: {len(c.variables)} variables for an MDD of arity {c.mdd.r}")
            for x in c.variables:
                if not 0 <= x < n:
                    raise ScopeError(f"constraint {ci}: variable {x} outside 0..{n - 1}")
        last = None
        for d in self.script:
            if not 0 <= d.constraint < len(self.constraints):
                raise DescriptorError(f"deletion refers to missing constraint {d.constraint}")
            if d.trigger < 0 or (last is not None and d.trigger <= last):
                raise DescriptorError(f"deletion triggers must be strictly increasing (got {d.trigger} after {last})")
            last = d.trigger
            scope = self.constraints[d.constraint].mdd.scope
            d.tuples = [scope.check_tuple(t) for t in d.tuples]


@dataclass
class SolveStats:
    nodes_visited: int = 0
    failures: int = 0
    deletions_fired: int = 0
    checks: int = 0
    seconds: float = 0.0
    counters: Counters = field(default_factory=Counters)

    def as_dict(self) -> dict:
        d = {"nodes_visited": self.nodes_visited, "failures": self.failures,
             "deletions_fired": self.deletions_fired, "seconds": round(self.seconds, 6)}
        d.update(self.counters.as_dict())
        return d


@dataclass
class SolutionSet:
    solutions: list[tuple[int, ...]]
    stats: SolveStats

    @property
    def count(self) -> int:
        return len(self.solutions)


class Search:
    def __init__(self, problem: Problem, backend: str = "mdd", instrumented: bool = False,
                 shuffle_seed: int | None = None):
        if backend not in ("mdd", "table"):
            raise MddError(f"unknown backend {backend!r}")
        self.problem = problem
        self.store = DomainStore(problem.domains)
        cls = MddPropagator if backend == "mdd" else TablePropagator
        self.props = []
        self.ok = True
        for c in problem.constraints:
            p = cls(c.mdd, self.store, c.variables)
            self.props.append(p)
        if shuffle_seed is not None:
            import random
            for i, p in enumerate(self.props):
                p.shuffle = random.Random(shuffle_seed * 7919 + i)
        self.ok = all(p.consistent for p in self.props) and self.store.propagate()
        self.script = problem.script
        self.next = 0
        self.instrumented = instrumented
        self.stats = SolveStats()
        self.solutions: list[tuple[int, ...]] = []
        # instrumented runs record ("solution", t) and ("delete", ci, tuples) in order
        self.trace: list[tuple] = []

    def _fire(self) -> bool:
        ok = True
        script, stats = self.script, self.stats
        while self.next < len(script) and script[self.next].trigger <= stats.nodes_visited:
            d = script[self.next]
            self.next += 1
            stats.deletions_fired += 1
            if self.instrumented:
                self.trace.append(("delete", d.constraint, d.tuples))
            ok = self.props[d.constraint].persistent_delete(d.tuples) and ok
        return ok

    def _check(self) -> None:
        self.stats.checks += 1
        for ci, p in enumerate(self.props):
            for t in p.deleted_tuples():
                if p.live_contains(t):
                    raise PersistenceViolation(f"constraint {ci}: deleted tuple {t} is live again")

    def _search(self, first_only: bool) -> bool:
        store, stats = self.store, self.stats
        sizes = store.sizes
        x = next((y for y in range(len(sizes)) if store.size(y) > 1), None)
        if x is None:
            sol = tuple(store.values(y)[0] for y in range(len(sizes)))
            self.solutions.append(sol)
            if self.instrumented:
                self.trace.append(("solution", sol))
            return not first_only
        for v in range(sizes[x]):
            if not store.contains(x, v):
                continue
            store.push_level()
            stats.nodes_visited += 1
            ok = store.assign(x, v) and store.propagate()
            if ok:
                ok = self._fire()
            if ok:
                if self.instrumented:
                    self._check()
                if not self._search(first_only):
                    store.pop_level()
                    return False
            else:
                stats.failures += 1
            if not store.pop_level():
                return True
            if self.instrumented:
                self._check()
        return True

    def run(self, first_only: bool = False) -> SolutionSet:
        t0 = time.perf_counter()
        if self.ok and self.problem.domains:
            self._search(first_only)
        self.stats.seconds = time.perf_counter() - t0
        total = Counters()
        for p in self.props:
            for k, v in vars(p.counters).items():
                setattr(total, k, getattr(total, k) + v)
        self.stats.counters = total
        return SolutionSet(self.solutions, self.stats)


def solve_all(problem: Problem, backend: str = "mdd", instrumented: bool = False,
              shuffle_seed: int | None = None) -> SolutionSet:
    """Every solution in lexicographic order, plus search statistics."""
    return Search(problem, backend, instrumented, shuffle_seed).run()


def solve_one(problem: Problem, backend: str = "mdd") -> tuple[int, ...] | None:
    res = Search(problem, backend).run(first_only=True)
    return res.solutions[0] if res.solutions else None


def single(mdd: Mdd, script: Sequence[Deletion] = ()) -> Problem:
    """Problem made of one constraint over all of its variables."""
    return Problem(mdd.domains, [Constraint(tuple(range(mdd.r)), mdd)], list(script))
