"""Reversible sparse sets, the restoration trail and the domain store."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .core import MddError


class Trail:
    """Undo log of ``(list, index, old_value)`` entries, grouped by level.

    Nothing is recorded at level 0: the root state is never restored.
    """

    def __init__(self):
        self._entries: list[tuple[list, int, object]] = []
        self._marks: list[int] = []
        self._clock = 0
        # unique per opened level; lets callers save a slot once per level
        self.stamp = 0

    @property
    def level(self) -> int:
        return len(self._marks)

    def push(self) -> None:
        self._marks.append(len(self._entries))
        self._clock += 1
        self.stamp = self._clock

    def pop(self) -> None:
        if not self._marks:
            raise MddError("pop_level on an empty trail")
        mark = self._marks.pop()
        entries = self._entries
        while len(entries) > mark:
            lst, i, old = entries.pop()
            lst[i] = old
        self._clock += 1
        self.stamp = self._clock if self._marks else 0

    def save(self, lst: list, i: int) -> None:
        if self._marks:
            self._entries.append((lst, i, lst[i]))

    def __len__(self) -> int:
        return len(self._entries)


class SparseFamily:
    """A family of disjoint sparse sets over elements ``0..n-1``.

    Set ``k`` is the prefix ``members[k][:size[k]]``; removing swaps the
    element behind that prefix, so restoring a set is just restoring its size
    (any permutation inside the prefix is harmless).  Every element belongs
    to exactly one set, and callers always know which.
    """

    __slots__ = ("members", "size", "pos", "stamp")

    def __init__(self, groups: Sequence[Iterable[int]], n_elems: int):
        self.members = [list(g) for g in groups]
        self.size = [len(g) for g in self.members]
        self.pos = [0] * n_elems
        pos = self.pos
        for g in self.members:
            for p, e in enumerate(g):
                pos[e] = p
        self.stamp = [0] * len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, k: int, e: int) -> bool:
        return self.pos[e] < self.size[k]

    def items(self, k: int) -> list[int]:
        return self.members[k][:self.size[k]]

    def _save(self, k: int, trail: Trail) -> None:
        if self.stamp[k] != trail.stamp:
            trail.save(self.size, k)
            self.stamp[k] = trail.stamp

    def remove(self, k: int, e: int, trail: Trail) -> int:
        """Remove ``e`` from set ``k``; returns the new size."""
        size = self.size
        last = size[k] - 1
        pos = self.pos
        p = pos[e]
        if p > last:
            return last + 1
        if self.stamp[k] != trail.stamp:
            trail.save(size, k)
            self.stamp[k] = trail.stamp
        mem = self.members[k]
        other = mem[last]
        mem[p] = other
        pos[other] = p
        mem[last] = e
        pos[e] = last
        size[k] = last
        return last

    def clear(self, k: int, trail: Trail) -> None:
        if self.size[k]:
            self._save(k, trail)
            self.size[k] = 0

    def reset(self, k: int, survivors: Sequence[int], trail: Trail) -> None:
        """Rebuild set ``k`` from ``survivors`` (a subset of its members)."""
        self._save(k, trail)
        mem, pos = self.members[k], self.pos
        for j, e in enumerate(survivors):
            p = pos[e]
            other = mem[j]
            mem[j] = e
            pos[e] = j
            mem[p] = other
            pos[other] = p
        self.size[k] = len(survivors)

    def reset_or_delete(self, k: int, doomed: Sequence[int], trail: Trail) -> str:
        """Remove ``doomed`` from set ``k``.

        When more than half of the set goes, the set is rebuilt from its
        survivors instead of removing elements one at a time.  Returns the
        strategy used: ``"noop"``, ``"reset"`` or ``"delete"``.
        """
        if not doomed:
            return "noop"
        size = self.size[k]
        if len(doomed) * 2 > size:
            gone = set(doomed)
            self.reset(k, [e for e in self.members[k][:size] if e not in gone], trail)
            return "reset"
        for e in doomed:
            self.remove(k, e, trail)
        return "delete"


class DomainStore:
    """Current domains of the search variables plus the shared trail.

    Removals are trailed and forwarded to every propagator watching the
    variable; propagators run round-robin until no events remain.
    """

    def __init__(self, domains: Sequence[int]):
        self.trail = Trail()
        self.sizes = tuple(int(d) for d in domains)
        self.offset = []
        off = 0
        for d in self.sizes:
            self.offset.append(off)
            off += d
        self._dom = SparseFamily([range(o, o + d) for o, d in zip(self.offset, self.sizes)], off)
        self.watchers: list[list[tuple[object, int]]] = [[] for _ in self.sizes]
        self.propagators: list = []
        self.queue: deque = deque()
        self.failed = False
        self.removals = 0

    @property
    def n_vars(self) -> int:
        return len(self.sizes)

    def attach(self, prop, variables: Sequence[int]) -> None:
        self.propagators.append(prop)
        for j, x in enumerate(variables):
            self.watchers[x].append((prop, j))

    def contains(self, x: int, v: int) -> bool:
        if not 0 <= v < self.sizes[x]:
            return False
        return self._dom.pos[self.offset[x] + v] < self._dom.size[x]

    def size(self, x: int) -> int:
        return self._dom.size[x]

    def values(self, x: int) -> list[int]:
        o = self.offset[x]
        return sorted(e - o for e in self._dom.items(x))

    def snapshot(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.values(x)) for x in range(self.n_vars))

    def remove(self, x: int, v: int) -> bool:
        """Remove ``v`` from ``x``; False if the domain became empty."""
        if not self.contains(x, v):
            return not self.failed
        left = self._dom.remove(x, self.offset[x] + v, self.trail)
        self.removals += 1
        if left == 0:
            self.failed = True
            return False
        for prop, j in self.watchers[x]:
            prop.notify(j, v)
        return True

    def assign(self, x: int, v: int) -> bool:
        for w in self.values(x):
            if w != v and not self.remove(x, w):
                return False
        return self.contains(x, v)

    def propagate(self) -> bool:
        """Run queued propagators to a fixpoint; False on a wipe-out."""
        queue = self.queue
        while queue and not self.failed:
            prop = queue.popleft()
            prop.queued = False
            if not prop.propagate():
                self.failed = True
        if self.failed:
            self._flush()
            return False
        return True

    def _flush(self) -> None:
        for prop in self.queue:
            prop.queued = False
        self.queue.clear()
        for prop in self.propagators:
            prop.pending.clear()
            prop.queued = False

    def push_level(self) -> None:
        self.trail.push()

    def pop_level(self) -> bool:
        """Backtrack one level, then restore persistent deletions and
        refilter.  Returns whether the restored state is consistent."""
        level = self.trail.level
        self.trail.pop()
        self.failed = False
        self._flush()
        for prop in self.propagators:
            prop.after_pop(level)
        return self.propagate()
