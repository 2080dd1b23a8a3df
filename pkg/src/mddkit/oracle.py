"""Brute-force reference semantics over explicit tuple sets.

Deliberately naive and independent of the diagram code: everything here
works on sorted Python tuples and full scans, so a bug in the MDD modules
cannot hide behind a matching bug in its checker.  Desk scale only.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class ExplicitSet:
    domains: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, domains: Sequence[int], tuples: Iterable[Sequence[int]]) -> "ExplicitSet":
        domains = tuple(domains)
        ts = sorted(set(tuple(t) for t in tuples))
        for t in ts:
            if len(t) != len(domains) or any(not 0 <= v < d for v, d in zip(t, domains)):
                raise OracleError(f"tuple {t} does not fit domains {domains}")
        return cls(domains, tuple(ts))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in set(self.tuples)


def _same_scope(a: ExplicitSet, b: ExplicitSet) -> None:
    if a.domains != b.domains:
        raise OracleError(f"scope mismatch: {a.domains} vs {b.domains}")


def o_universe(domains: Sequence[int]) -> ExplicitSet:
    return ExplicitSet.of(domains, product(*(range(d) for d in domains)))


def o_union(a: ExplicitSet, b: ExplicitSet) -> ExplicitSet:
    _same_scope(a, b)
    return ExplicitSet.of(a.domains, list(a.tuples) + list(b.tuples))


def o_difference(a: ExplicitSet, b: ExplicitSet) -> ExplicitSet:
    _same_scope(a, b)
    drop = set(b.tuples)
    return ExplicitSet.of(a.domains, [t for t in a.tuples if t not in drop])


def o_complement(a: ExplicitSet) -> ExplicitSet:
    return o_difference(o_universe(a.domains), a)


def o_gcs_expand(domains: Sequence[int], sets: Sequence[Sequence[int]]) -> ExplicitSet:
    for s, d in zip(sets, domains):
        if not s or any(not 0 <= v < d for v in s):
            raise OracleError(f"bad value set {s}")
    return ExplicitSet.of(domains, product(*sets))


def o_sequence_expand(domains: Sequence[int], sets: Sequence[Sequence[int]],
                      tmin: Sequence[int], tmax: Sequence[int]) -> ExplicitSet:
    tmin, tmax = tuple(tmin), tuple(tmax)
    if tmin > tmax:
        raise OracleError("tmin > tmax")
    for i, s in enumerate(sets):
        if tmin[i] not in s or tmax[i] not in s:
            raise OracleError(f"bounds leave value set {i}")
    full = o_gcs_expand(domains, sets)
    return ExplicitSet.of(domains, [t for t in full.tuples if tmin <= t <= tmax])


def o_ac_supports(tuples: ExplicitSet, doms: Sequence[Iterable[int]]) -> list[set[int]]:
    """Values of each variable used by some tuple that fits every domain."""
    doms = [set(d) for d in doms]
    keep = [set() for _ in doms]
    for t in tuples.tuples:
        if all(v in d for v, d in zip(t, doms)):
            for i, v in enumerate(t):
                keep[i].add(v)
    return keep


# -- reference solver ---------------------------------------------------------


def o_solve_all(domains: Sequence[int], constraints: Sequence[tuple[Sequence[int], Iterable[Sequence[int]]]],
                script: Sequence[tuple[int, int, Iterable[Sequence[int]]]] = (),
                first_only: bool = False):
    """All solutions of a problem given by explicit tables, with scripted
    permanent deletions.

    Constraints are ``(variables, tuples)`` pairs.  ``script`` entries are
    ``(trigger, constraint_index, tuples)``; a deletion fires at the first
    consistent search node whose visit count reaches its trigger.  Filtering
    rescans every table until nothing changes; search is depth-first on the
    smallest-index unfixed variable with ascending values.  Returns
    ``(solutions, nodes_visited)``.
    """
    tables = [set(tuple(t) for t in ts) for _, ts in constraints]
    scopes = [tuple(vs) for vs, _ in constraints]
    script = sorted(((trig, ci, [tuple(t) for t in ts]) for trig, ci, ts in script))
    state = {"nodes": 0, "next": 0}
    solutions: list[tuple[int, ...]] = []

    def fixpoint(doms: list[set[int]]) -> bool:
        changed = True
        while changed:
            changed = False
            for ci, sc in enumerate(scopes):
                seen = [set() for _ in sc]
                for t in tables[ci]:
                    if all(t[j] in doms[x] for j, x in enumerate(sc)):
                        for j, v in enumerate(t):
                            seen[j].add(v)
                for j, x in enumerate(sc):
                    if doms[x] - seen[j]:
                        doms[x] &= seen[j]
                        changed = True
                        if not doms[x]:
                            return False
        return True

    def fire(doms: list[set[int]]) -> bool:
        fired = False
        while state["next"] < len(script) and script[state["next"]][0] <= state["nodes"]:
            _, ci, ts = script[state["next"]]
            tables[ci].difference_update(ts)
            state["next"] += 1
            fired = True
        return fixpoint(doms) if fired else True

    def search(doms: list[set[int]]) -> bool:
        """Returns False to stop the whole search (first_only)."""
        free = [x for x, d in enumerate(doms) if len(d) > 1]
        if not free:
            solutions.append(tuple(min(d) for d in doms))
            return not first_only
        x = free[0]
        for v in range(domains[x]):
            if v not in doms[x]:
                continue
            child = [set(d) for d in doms]
            child[x] = {v}
            state["nodes"] += 1
            if fixpoint(child) and fire(child):
                if not search(child):
                    return False
            # deletions made below persist: refilter this node
            if not fixpoint(doms):
                return True
        return True

    root = [set(range(d)) for d in domains]
    if fixpoint(root):
        search(root)
    return solutions, state["nodes"]
