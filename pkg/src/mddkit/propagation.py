"""Arc-consistency filtering for MDD and explicit-table constraints.

An ``MddPropagator`` compiles the diagram into flat arc arrays and keeps
three families of reversible sparse sets over the arc ids: outgoing arcs
per node, incoming arcs per node, and supports per (variable, value).  A
value removal kills its whole support list and the cascade kills nodes that
lose all incoming or all outgoing arcs.  Liveness lives in the set sizes,
so backtracking is a matter of restoring sizes from the trail.

Persistent deletions edit a structural copy of the live diagram.  Each edit
produces a new compiled *frame* tagged with the search level it was made
at; when that level is popped the frame is dropped, the older frame comes
back through the trail, and the logged deletions are replayed on it.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .builders import build_from_tuples
from .core import Mdd, Scope, ScopeError, TupleTable
from .editops import delete_set
from .sparse import DomainStore, SparseFamily, Trail

ROOT, TT = 0, 1


@dataclass
class Counters:
    arcs_deleted: int = 0      # arcs deactivated by filtering
    nodes_deleted: int = 0     # nodes deactivated by filtering
    resets: int = 0
    values_removed: int = 0
    tuples_requested: int = 0  # tuples passed to persistent_delete
    tuples_deleted: int = 0    # of those, distinct tuples of the relation not deleted before
    nodes_created: int = 0     # structural edits (persistent deletions)
    arcs_created: int = 0
    edit_nodes_deleted: int = 0
    edit_arcs_deleted: int = 0
    snapshots: int = 0
    replays: int = 0

    @property
    def modifications(self) -> int:
        return self.nodes_created + self.arcs_created + self.edit_nodes_deleted + self.edit_arcs_deleted

    def as_dict(self) -> dict[str, int]:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["modifications"] = self.modifications
        return d

    def dump(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())


@dataclass
class LogEntry:
    level: int
    tuples: list[tuple[int, ...]]


class _Frame:
    """Flat compiled form of a reduced MDD."""

    def __init__(self, mdd: Mdd, level: int):
        self.level = level
        self.r = r = mdd.r
        self.domains = mdd.domains
        self.offset = []
        off = 0
        for d in self.domains:
            self.offset.append(off)
            off += d
        ids = {mdd.root: ROOT, mdd.tt: TT}
        layer = [0, r]
        for n in mdd.nodes():
            if n not in ids:
                ids[n] = len(layer)
                layer.append(mdd.layer_of(n))
        n_nodes = len(layer)
        self.node_layer = layer
        self.layer_nodes = [[] for _ in range(r + 1)]
        for n, lay in enumerate(layer):
            self.layer_nodes[lay].append(n)
        src, dst, lab, akey = [], [], [], []
        outs = [[] for _ in range(n_nodes)]
        ins = [[] for _ in range(n_nodes)]
        sups = [[] for _ in range(off)]
        offset = self.offset
        for n, v, c in mdd.arcs():
            a = len(src)
            s, t = ids[n], ids[c]
            k = offset[layer[s]] + v
            src.append(s)
            dst.append(t)
            lab.append(v)
            akey.append(k)
            outs[s].append(a)
            ins[t].append(a)
            sups[k].append(a)
        self.src, self.dst, self.lab, self.akey = src, dst, lab, akey
        self.arc_var = [layer[s] for s in src]
        n_arcs = len(src)
        self.out = SparseFamily(outs, n_arcs)
        self.inn = SparseFamily(ins, n_arcs)
        self.sup = SparseFamily(sups, n_arcs)

    def key(self, j: int, v: int) -> int:
        if 0 <= v < self.domains[j]:
            return self.offset[j] + v
        return -1

    def is_live(self, a: int) -> bool:
        return self.out.pos[a] < self.out.size[self.src[a]]

    def live_arcs(self) -> list[int]:
        out = self.out
        return [a for n in range(len(self.node_layer)) for a in out.members[n][:out.size[n]]]


class _FramedPropagator:
    """Queueing, persistence log and frame stack shared by both backends."""

    def __init__(self, store: DomainStore, domains: Sequence[int], variables: Sequence[int] | None):
        self.store = store
        self.trail: Trail = store.trail
        self.scope = Scope(tuple(domains))
        self.vars = tuple(range(self.scope.arity) if variables is None else variables)
        if len(self.vars) != self.scope.arity:
            raise ScopeError(f"{len(self.vars)} variables for a constraint of arity {self.scope.arity}")
        for x in self.vars:
            if not 0 <= x < store.n_vars:
                raise ScopeError(f"variable {x} outside the store")
        if len(set(self.vars)) != len(self.vars):
            raise ScopeError(f"repeated variable in {self.vars}")
        self.pending: deque = deque()
        self.queued = False
        self.counters = Counters()
        self.log: list[LogEntry] = []
        self.gone: set[tuple[int, ...]] = set()   # every tuple ever logged
        self.frames: list = []
        # set to a random.Random to process pending events in random order
        self.shuffle: random.Random | None = None
        self.consistent = True

    # -- events

    def notify(self, j: int, v: int) -> None:
        self.pending.append((j, v))
        if not self.queued:
            self.queued = True
            self.store.queue.append(self)

    def propagate(self) -> bool:
        pending = self.pending
        rng = self.shuffle
        while pending:
            if rng is not None:
                i = rng.randrange(len(pending))
                pending[i], pending[-1] = pending[-1], pending[i]
                j, v = pending.pop()
            else:
                j, v = pending.popleft()
            if not self._remove_value(j, v):
                return False
        return True

    def _start(self) -> bool:
        self.store.attach(self, self.vars)
        self.consistent = self._sync() and self.store.propagate()
        return self.consistent

    def _sync(self) -> bool:
        """Align a fresh frame with the store: drop unsupported domain values
        and queue removals for arcs carrying values no longer in a domain."""
        store = self.store
        for j, x in enumerate(self.vars):
            for v in range(max(self.scope.domains[j], store.sizes[x])):
                has = self._supported(j, v)
                if store.contains(x, v):
                    if not has:
                        self.counters.values_removed += 1
                        if not store.remove(x, v):
                            return False
                elif has:
                    self.notify(j, v)
        return True

    @property
    def frame(self):
        return self.frames[-1]

    # -- persistence

    def persistent_delete(self, tuples: Iterable[Sequence[int]]) -> bool:
        """Remove ``tuples`` for good, then refilter.  False on a wipe-out."""
        ts = [self.scope.check_tuple(t) for t in tuples]
        self.counters.tuples_requested += len(ts)
        gone = self.gone
        for t in set(ts):
            if t not in gone:
                gone.add(t)
                self.counters.tuples_deleted += self._in_relation(t)
        self.log.append(LogEntry(self.trail.level, ts))
        if not self.store.failed:
            self._apply(ts)
        return self.store.propagate()

    def _apply(self, ts: list[tuple[int, ...]]) -> int:
        live = [t for t in set(ts) if self.live_contains(t)]
        if live:
            self.counters.snapshots += 1
            self._rebuild(live)
            self._sync()
        return len(live)

    def after_pop(self, popped: int) -> None:
        """Called once the trail has undone level ``popped``."""
        frames = self.frames
        while len(frames) > 1 and frames[-1].level >= popped:
            frames.pop()
        moved: list[tuple[int, ...]] = []
        log = self.log
        i = len(log)
        while i > 0 and log[i - 1].level >= popped:
            i -= 1
            log[i].level = popped - 1
            moved.extend(log[i].tuples)
        if moved:
            # coalesce the moved entries; replay order does not matter
            rest = log[i:]
            del log[i:]
            log.append(LogEntry(popped - 1, [t for e in rest for t in e.tuples]))
            self.counters.replays += 1
            self._apply(moved)

    def _push_frame(self, frame) -> None:
        # a frame made earlier at this same level is superseded: its trail
        # entries die with the level anyway
        if self.frames[-1].level == frame.level:
            self.frames.pop()
        self.frames.append(frame)

    def deleted_tuples(self) -> set[tuple[int, ...]]:
        return set(self.gone)

    # -- backend hooks

    def _supported(self, j: int, v: int) -> bool:
        raise NotImplementedError

    def _remove_value(self, j: int, v: int) -> bool:
        raise NotImplementedError

    def _rebuild(self, deleted: list[tuple[int, ...]]) -> None:
        raise NotImplementedError

    def live_contains(self, t: Sequence[int]) -> bool:
        raise NotImplementedError

    def _in_relation(self, t: tuple[int, ...]) -> bool:
        """Membership in the constraint as first posted."""
        raise NotImplementedError

    def live_tuples(self) -> list[tuple[int, ...]]:
        raise NotImplementedError

    def live_signature(self) -> tuple:
        raise NotImplementedError

    # -- conveniences over the store, indexed by local variable

    def domain(self, j: int) -> list[int]:
        return self.store.values(self.vars[j])

    def domains(self) -> list[list[int]]:
        return [self.domain(j) for j in range(self.scope.arity)]

    def remove_value(self, j: int, v: int) -> bool:
        return self.store.remove(self.vars[j], v)

    def push_level(self) -> None:
        self.store.push_level()

    def pop_level(self) -> bool:
        return self.store.pop_level()


class MddPropagator(_FramedPropagator):
    """MDD-4R style propagator for one MDD constraint."""

    def __init__(self, mdd: Mdd, store: DomainStore, variables: Sequence[int] | None = None):
        super().__init__(store, mdd.domains, variables)
        if not mdd.is_reduced:
            mdd = mdd.copy().reduce()
        self.frames.append(_Frame(mdd, self.trail.level))
        self._start()

    def _supported(self, j: int, v: int) -> bool:
        k = self.frame.key(j, v)
        return k >= 0 and self.frame.sup.size[k] > 0

    def supports(self, j: int, v: int) -> list[tuple[int, int, int]]:
        """Live arcs ``(src, label, dst)`` carrying ``v`` for local variable ``j``."""
        F = self.frame
        k = F.key(j, v)
        if k < 0:
            return []
        return sorted((F.src[a], F.lab[a], F.dst[a]) for a in F.sup.items(k))

    def _remove_value(self, j: int, v: int) -> bool:
        F = self.frame
        k = F.key(j, v)
        if k < 0:
            return True
        sup = F.sup
        s = sup.size[k]
        if s == 0:
            return True
        trail = self.trail
        c = self.counters
        doomed = sup.members[k][:s]
        sup.clear(k, trail)
        src, dst = F.src, F.dst
        by_src: dict[int, list[int]] = {}
        by_dst: dict[int, list[int]] = {}
        for a in doomed:
            by_src.setdefault(src[a], []).append(a)
            by_dst.setdefault(dst[a], []).append(a)
        up, down = [], []
        out, inn = F.out, F.inn
        for n, arcs in by_src.items():
            if out.reset_or_delete(n, arcs, trail) == "reset":
                c.resets += 1
            if out.size[n] == 0:
                up.append(n)
        for n, arcs in by_dst.items():
            if inn.reset_or_delete(n, arcs, trail) == "reset":
                c.resets += 1
            if inn.size[n] == 0:
                down.append(n)
        c.arcs_deleted += s
        return self._cascade(up, down)

    def _cascade(self, up: list[int], down: list[int]) -> bool:
        F = self.frame
        trail = self.trail
        c = self.counters
        sup, out, inn = F.sup, F.out, F.inn
        src, dst, akey = F.src, F.dst, F.akey
        lost = []
        while up or down:
            while up:
                n = up.pop()
                if n == ROOT:
                    return False
                s = inn.size[n]
                if not s:
                    continue
                arcs = inn.members[n][:s]
                inn.clear(n, trail)
                c.nodes_deleted += 1
                c.arcs_deleted += s
                for a in arcs:
                    if sup.remove(akey[a], a, trail) == 0:
                        lost.append(a)
                    p = src[a]
                    if out.remove(p, a, trail) == 0:
                        up.append(p)
            while down:
                n = down.pop()
                if n == TT:
                    return False
                s = out.size[n]
                if not s:
                    continue
                arcs = out.members[n][:s]
                out.clear(n, trail)
                c.nodes_deleted += 1
                c.arcs_deleted += s
                for a in arcs:
                    if sup.remove(akey[a], a, trail) == 0:
                        lost.append(a)
                    q = dst[a]
                    if inn.remove(q, a, trail) == 0:
                        down.append(q)
        store, vars_, lab, avar = self.store, self.vars, F.lab, F.arc_var
        for a in lost:
            x, v = vars_[avar[a]], lab[a]
            if store.contains(x, v):
                c.values_removed += 1
                if not store.remove(x, v):
                    return False
        return True

    # -- views of the live part

    def live_mdd(self) -> Mdd:
        """Reduced structural copy of the live part of the current frame."""
        F = self.frame
        out, src, dst, lab = F.out, F.src, F.dst, F.lab
        m = Mdd(F.domains)
        new = {TT: m.tt}
        for lay in range(F.r - 1, 0, -1):
            for n in F.layer_nodes[lay]:
                s = out.size[n]
                if s:
                    arcs = sorted((lab[a], new[dst[a]]) for a in out.members[n][:s])
                    new[n] = m.make_node(lay, arcs)
        for a in sorted(out.items(ROOT), key=lab.__getitem__):
            m.add_arc(m.root, lab[a], new[dst[a]])
        return m

    def live_contains(self, t: Sequence[int]) -> bool:
        F = self.frame
        out, lab, dst = F.out, F.lab, F.dst
        n = ROOT
        for v in t:
            for a in out.members[n][:out.size[n]]:
                if lab[a] == v:
                    n = dst[a]
                    break
            else:
                return False
        return True

    def _in_relation(self, t: tuple[int, ...]) -> bool:
        F = self.frames[0]
        n = ROOT
        for v in t:
            n = next((F.dst[a] for a in F.out.members[n] if F.lab[a] == v), None)
            if n is None:
                return False
        return True

    def live_tuples(self) -> list[tuple[int, ...]]:
        return list(self.live_mdd().iter_tuples())

    def live_signature(self) -> tuple:
        F = self.frame
        arcs = sorted((F.src[a], F.lab[a], F.dst[a]) for a in F.live_arcs())
        return (len(self.frames), tuple(arcs))

    def _rebuild(self, deleted: list[tuple[int, ...]]) -> None:
        live = self.live_mdd()
        summary = delete_set(live, build_from_tuples(self.scope.domains, deleted))
        c = self.counters
        c.nodes_created += summary.nodes_created
        c.arcs_created += summary.arcs_created
        c.edit_nodes_deleted += summary.nodes_deleted
        c.edit_arcs_deleted += summary.arcs_deleted
        self._push_frame(_Frame(live, self.trail.level))


PropagatorState = MddPropagator


class _TableFrame:
    def __init__(self, domains: tuple[int, ...], rows: list[tuple[int, ...]], level: int):
        self.level = level
        self.domains = domains
        self.r = r = len(domains)
        self.rows = rows
        self.index = {t: i for i, t in enumerate(rows)}
        self.offset = []
        off = 0
        for d in domains:
            self.offset.append(off)
            off += d
        groups = [[] for _ in range(off)]
        offset = self.offset
        for ti, row in enumerate(rows):
            base = ti * r
            for i, v in enumerate(row):
                groups[offset[i] + v].append(base + i)
        # element ti*r + i stands for tuple ti in the support set of variable i
        self.sup = SparseFamily(groups, len(rows) * r)

    def key(self, j: int, v: int) -> int:
        if 0 <= v < self.domains[j]:
            return self.offset[j] + v
        return -1

    def live(self, ti: int) -> bool:
        e = ti * self.r
        return self.sup.pos[e] < self.sup.size[self.offset[0] + self.rows[ti][0]]


class TablePropagator(_FramedPropagator):
    """GAC-4 style baseline over an explicit tuple list.

    A deleted tuple costs one update per variable, whatever the data.
    """

    def __init__(self, table: TupleTable | Mdd, store: DomainStore, variables: Sequence[int] | None = None):
        super().__init__(store, table.domains, variables)
        rows = list(table.iter_tuples()) if isinstance(table, Mdd) else sorted(set(table.rows))
        self.frames.append(_TableFrame(self.scope.domains, rows, self.trail.level))
        self._start()

    def _supported(self, j: int, v: int) -> bool:
        k = self.frame.key(j, v)
        return k >= 0 and self.frame.sup.size[k] > 0

    def _remove_value(self, j: int, v: int) -> bool:
        F = self.frame
        k = F.key(j, v)
        if k < 0:
            return True
        sup = F.sup
        s = sup.size[k]
        if s == 0:
            return True
        trail = self.trail
        r, rows, offset = F.r, F.rows, F.offset
        doomed = sup.members[k][:s]
        sup.clear(k, trail)
        lost = []
        for e in doomed:
            ti = e // r
            row = rows[ti]
            base = ti * r
            for i in range(r):
                if i != j and sup.remove(offset[i] + row[i], base + i, trail) == 0:
                    lost.append((i, row[i]))
        c = self.counters
        c.arcs_deleted += s
        store, vars_ = self.store, self.vars
        for i, w in lost:
            x = vars_[i]
            if store.contains(x, w):
                c.values_removed += 1
                if not store.remove(x, w):
                    return False
        return True

    def live_contains(self, t: Sequence[int]) -> bool:
        F = self.frame
        ti = F.index.get(tuple(t))
        return ti is not None and F.live(ti)

    def live_tuples(self) -> list[tuple[int, ...]]:
        F = self.frame
        return [row for ti, row in enumerate(F.rows) if F.live(ti)]

    def _in_relation(self, t: tuple[int, ...]) -> bool:
        return t in self.frames[0].index

    def live_signature(self) -> tuple:
        return (len(self.frames), tuple(self.live_tuples()))

    def _rebuild(self, deleted: list[tuple[int, ...]]) -> None:
        gone = set(deleted)
        rows = [t for t in self.live_tuples() if t not in gone]
        c = self.counters
        c.edit_arcs_deleted += self.scope.arity * len(gone)
        self._push_frame(_TableFrame(self.scope.domains, rows, self.trail.level))


# -- functional surface ---------------------------------------------------------


def init_propagator(mdd: Mdd, doms: DomainStore | None = None,
                    variables: Sequence[int] | None = None) -> MddPropagator:
    """Attach an MDD propagator to ``doms`` (a fresh store over the MDD's
    domains by default) and filter once; check ``.consistent``."""
    if doms is None:
        doms = DomainStore(mdd.domains)
    return MddPropagator(mdd, doms, variables)


def remove_value(state: _FramedPropagator, i: int, v: int) -> bool:
    return state.remove_value(i, v)


def propagate(state: _FramedPropagator) -> bool:
    return state.store.propagate()


def push_level(state: _FramedPropagator) -> None:
    state.store.push_level()


def pop_level(state: _FramedPropagator) -> bool:
    return state.store.pop_level()


restore_after_backtrack = pop_level


def persistent_delete(state: _FramedPropagator, tuples: TupleTable | Iterable[Sequence[int]]) -> bool:
    rows = tuples.rows if isinstance(tuples, TupleTable) else tuples
    return state.persistent_delete(rows)


def state_digest(store: DomainStore) -> tuple:
    """Canonical view of a store and its propagators, for restoration checks."""
    return (store.snapshot(), tuple(p.live_signature() for p in store.propagators))
