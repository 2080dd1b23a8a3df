"""In-place addition and deletion of tuple sets by path isolation.

Both operations walk the target diagram ``mdd1`` and the edit set ``mdd2``
in lockstep from their roots.  Every pair ``(x1, x2)`` of nodes reached by a
common prefix gets a fresh *isolated* node in ``mdd1``; arcs of ``x1`` the
edit set does not follow are copied onto the isolated node and keep pointing
into the original diagram.  Only the isolated part is then trimmed (deletion)
or extended (addition), after which a local reduction merges it back.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .builders import tuple_mdd
from .core import ChangeSummary, Mdd, ScopeError, complement, equivalent

NIL = -1


@dataclass
class IsolationFrontier:
    """Isolated nodes per layer, keyed by their ``(x1, x2)`` origin pair.

    ``x1`` is :data:`NIL` for nodes that only exist in the edit set.
    """

    layers: list[dict[tuple[int, int], int]] = field(default_factory=list)

    @classmethod
    def for_arity(cls, r: int) -> "IsolationFrontier":
        return cls([{} for _ in range(r + 1)])

    def nodes(self) -> list[int]:
        return [n for layer in self.layers for n in layer.values()]

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)


@dataclass
class EditSummary(ChangeSummary):
    frontier_size: int = 0
    examined: int = 0


def _check(mdd1: Mdd, mdd2: Mdd) -> Mdd:
    if mdd1.domains != mdd2.domains:
        raise ScopeError(f"scope mismatch: {mdd1.domains} vs {mdd2.domains}")
    if mdd2 is mdd1:
        mdd2 = mdd2.copy()
    if not mdd1.is_reduced:
        mdd1.reduce()
    return mdd2


def _pair_node(mdd1: Mdd, frontier: IsolationFrontier, layer: int, y1: int, y2: int) -> int:
    key = (y1, y2)
    slot = frontier.layers[layer]
    y = slot.get(key)
    if y is None:
        y = mdd1.new_node(layer)
        slot[key] = y
    return y


def _finish(mdd1: Mdd, frontier: IsolationFrontier, before: ChangeSummary) -> EditSummary:
    examined = incremental_reduce(mdd1, frontier)
    diff = mdd1.counts - before
    return EditSummary(diff.nodes_created, diff.nodes_deleted, diff.arcs_created,
                       diff.arcs_deleted, frontier_size=len(frontier), examined=examined)


def delete_set(mdd1: Mdd, mdd2: Mdd) -> EditSummary:
    """Remove every tuple of ``mdd2`` from ``mdd1`` in place."""
    mdd2 = _check(mdd1, mdd2)
    before = mdd1.counts.copy()
    r = mdd1.r
    tt1 = mdd1.tt
    frontier = IsolationFrontier.for_arity(r)
    root1 = mdd1.root
    out2 = mdd2.children(mdd2.root)
    for v, y1 in sorted(mdd1.children(root1).items()):
        y2 = out2.get(v)
        if y2 is None:
            continue
        mdd1.remove_arc(root1, v)
        if r > 1:
            mdd1.add_arc(root1, v, _pair_node(mdd1, frontier, 1, y1, y2))
    for i in range(1, r):
        for (x1, x2), x in sorted(frontier.layers[i].items()):
            out2 = mdd2.children(x2)
            for v, y1 in sorted(mdd1.children(x1).items()):
                y2 = out2.get(v)
                if y2 is None:
                    mdd1.add_arc(x, v, y1)
                elif y1 != tt1:
                    mdd1.add_arc(x, v, _pair_node(mdd1, frontier, i + 1, y1, y2))
                # common arc into tt: the deleted tuples end here
    return _finish(mdd1, frontier, before)


def add_set(mdd1: Mdd, mdd2: Mdd) -> EditSummary:
    """Add every tuple of ``mdd2`` to ``mdd1`` in place."""
    mdd2 = _check(mdd1, mdd2)
    before = mdd1.counts.copy()
    r = mdd1.r
    tt1 = mdd1.tt
    frontier = IsolationFrontier.for_arity(r)
    root1 = mdd1.root
    out1 = mdd1.children(root1)
    for v, y2 in sorted(mdd2.children(mdd2.root).items()):
        y1 = out1.get(v)
        if r == 1:
            if y1 is None:
                mdd1.add_arc(root1, v, tt1)
            continue
        if y1 is not None:
            mdd1.remove_arc(root1, v)
        mdd1.add_arc(root1, v, _pair_node(mdd1, frontier, 1, NIL if y1 is None else y1, y2))
    for i in range(1, r):
        last = i == r - 1
        for (x1, x2), x in sorted(frontier.layers[i].items()):
            out1 = {} if x1 == NIL else mdd1.children(x1)
            out2 = mdd2.children(x2)
            for v in sorted(out1.keys() | out2.keys()):
                y1 = out1.get(v)
                y2 = out2.get(v)
                if last:
                    mdd1.add_arc(x, v, tt1)
                elif y2 is None:
                    mdd1.add_arc(x, v, y1)
                else:
                    mdd1.add_arc(x, v, _pair_node(mdd1, frontier, i + 1, NIL if y1 is None else y1, y2))
    return _finish(mdd1, frontier, before)


def delete_tuple(mdd: Mdd, t: Sequence[int]) -> EditSummary:
    """Remove one tuple; a no-op (nothing touched) if it is absent."""
    t = mdd.scope.check_tuple(t)
    if not mdd.contains(t):
        return EditSummary()
    return delete_set(mdd, tuple_mdd(mdd.domains, t))


def add_tuple(mdd: Mdd, t: Sequence[int]) -> EditSummary:
    """Add one tuple; a no-op if it is already present."""
    t = mdd.scope.check_tuple(t)
    if mdd.contains(t):
        return EditSummary()
    return add_set(mdd, tuple_mdd(mdd.domains, t))


def incremental_reduce(mdd: Mdd, frontier: IsolationFrontier | None = None) -> int:
    """Drop dead nodes and merge equivalents around the frontier.

    Returns the number of nodes whose signature was examined.
    """
    nodes = frontier.nodes() if frontier is not None else ()
    return mdd.incremental_reduce(nodes)


def duality_check(mdd: Mdd, t_set: Mdd) -> bool:
    """``add_set(M, T)`` must equal ``complement(delete_set(complement(M), T))``."""
    if mdd.domains != t_set.domains:
        raise ScopeError(f"scope mismatch: {mdd.domains} vs {t_set.domains}")
    added = mdd.copy()
    add_set(added, t_set)
    dual = complement(mdd)
    delete_set(dual, t_set)
    return equivalent(added, complement(dual))
