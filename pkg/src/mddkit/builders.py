"""Building reduced MDDs from tables, tries, GCSs and tuple sequences."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .core import DescriptorError, Mdd, MddError, Scope, ScopeError, TupleTable


class NotDisjointError(DescriptorError):
    pass


@dataclass
class Trie:
    """Prefix tree over a tuple set; nodes are list indices, 0 is the root."""

    domains: tuple[int, ...]
    children: list[dict[int, int]] = field(default_factory=lambda: [{}])
    depth: list[int] = field(default_factory=lambda: [0])

    @property
    def root(self) -> int:
        return 0

    @property
    def n_nodes(self) -> int:
        return len(self.children)

    @property
    def n_leaves(self) -> int:
        r = len(self.domains)
        return sum(1 for d in self.depth if d == r)

    def tuples(self):
        r = len(self.domains)
        stack = [(0, ())]
        while stack:
            n, prefix = stack.pop()
            if self.depth[n] == r:
                yield prefix
                continue
            for v in sorted(self.children[n], reverse=True):
                stack.append((self.children[n][v], prefix + (v,)))


@dataclass(frozen=True)
class Gcs:
    """Cartesian product of one value set per variable."""

    domains: tuple[int, ...]
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        object.__setattr__(self, "sets", tuple(tuple(sorted(set(s))) for s in self.sets))
        Scope(self.domains)
        if len(self.sets) != len(self.domains):
            raise DescriptorError(f"GCS has {len(self.sets)} sets for {len(self.domains)} variables")
        for i, (s, d) in enumerate(zip(self.sets, self.domains)):
            if not s:
                raise DescriptorError(f"GCS value set {i} is empty")
            if s[0] < 0 or s[-1] >= d:
                raise DescriptorError(f"GCS value set {i} leaves domain 0..{d - 1}")

    def size(self) -> int:
        n = 1
        for s in self.sets:
            n *= len(s)
        return n

    def min_tuple(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.sets)

    def max_tuple(self) -> tuple[int, ...]:
        return tuple(s[-1] for s in self.sets)


@dataclass(frozen=True)
class TupleSequence:
    """Tuples of a GCS lying lexicographically between ``tmin`` and ``tmax``
    (both inclusive)."""

    gcs: Gcs
    tmin: tuple[int, ...]
    tmax: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tmin", tuple(self.tmin))
        object.__setattr__(self, "tmax", tuple(self.tmax))
        r = len(self.gcs.sets)
        for name, t in (("tmin", self.tmin), ("tmax", self.tmax)):
            if len(t) != r:
                raise DescriptorError(f"{name} has arity {len(t)}, expected {r}")
            for i, v in enumerate(t):
                if v not in self.gcs.sets[i]:
                    raise DescriptorError(f"{name}[{i}] = {v} is not in the GCS value set {self.gcs.sets[i]}")
        if self.tmin > self.tmax:
            raise DescriptorError(f"tmin {self.tmin} > tmax {self.tmax}")

    @property
    def domains(self) -> tuple[int, ...]:
        return self.gcs.domains

    @classmethod
    def from_gcs(cls, g: Gcs) -> "TupleSequence":
        return cls(g, g.min_tuple(), g.max_tuple())


def _sorted_rows(table: TupleTable) -> list[tuple[int, ...]]:
    if table.is_sorted:
        return table.rows
    return sorted(set(table.rows))


def build_trie(table: TupleTable) -> Trie:
    """Build a trie in one pass over the sorted table.

    Each new row shares a prefix with the previous one only, so the insertion
    point is always on the rightmost path and no child lookup is needed.
    """
    r = len(table.domains)
    trie = Trie(table.domains)
    children, depth = trie.children, trie.depth
    path = [0]
    prev = None
    for row in _sorted_rows(table):
        if prev is not None:
            if row == prev:
                continue
            if row < prev:
                raise MddError("table flagged sorted is not sorted")
            k = 0
            while row[k] == prev[k]:
                k += 1
            del path[k + 1:]
        else:
            k = 0
        for i in range(k, r):
            n = len(children)
            children.append({})
            depth.append(i + 1)
            children[path[i]][row[i]] = n
            path.append(n)
        prev = row
    return trie


def trie_to_mdd(trie: Trie) -> Mdd:
    """Merge the trie's leaves into tt and reduce."""
    m = Mdd(trie.domains)
    r = m.r
    ids = {0: m.root}
    for n, dep in enumerate(trie.depth):
        if n == 0:
            continue
        ids[n] = m.tt if dep == r else m.new_node(dep)
    for n, kids in enumerate(trie.children):
        for v in sorted(kids):
            m.add_arc(ids[n], v, ids[kids[v]])
    return m.reduce()


def build_from_sorted_table(table: TupleTable) -> Mdd:
    """Reduced MDD of a table in time linear in its size (after sorting).

    Same rightmost-path walk as :func:`build_trie`, but a trie node is
    hash-consed into the diagram as soon as the walk leaves it, so the full
    trie never exists in memory.
    """
    m = Mdd(table.domains)
    r = m.r
    tt = m.tt
    make = m.make_node
    # open_arcs[i]: arcs of the unfinished node of layer i; the last one
    # points at an unfinished child (None) except on layer r - 1
    open_arcs: list[list] = [[] for _ in range(r)]
    prev = None
    for row in _sorted_rows(table):
        if prev is None:
            k = 0
        else:
            if row == prev:
                continue
            if row < prev:
                raise MddError("table flagged sorted is not sorted")
            k = 0
            while row[k] == prev[k]:
                k += 1
            for i in range(r - 1, k, -1):
                node = make(i, open_arcs[i])
                open_arcs[i] = []
                above = open_arcs[i - 1]
                above[-1] = (above[-1][0], node)
        for i in range(k, r - 1):
            open_arcs[i].append((row[i], None))
        open_arcs[r - 1].append((row[r - 1], tt))
        prev = row
    if prev is None:
        return m
    for i in range(r - 1, 0, -1):
        node = make(i, open_arcs[i])
        above = open_arcs[i - 1]
        above[-1] = (above[-1][0], node)
    for v, c in open_arcs[0]:
        m.add_arc(m.root, v, c)
    return m


def build_from_tuples(domains: Sequence[int], rows: Iterable[Sequence[int]]) -> Mdd:
    return build_from_sorted_table(TupleTable(tuple(domains), [tuple(t) for t in rows]))


def tuple_mdd(domains: Sequence[int], t: Sequence[int]) -> Mdd:
    """Chain diagram accepting the single tuple ``t``."""
    m = Mdd(domains)
    t = m.scope.check_tuple(t)
    child = m.tt
    for i in range(m.r - 1, 0, -1):
        child = m.make_node(i, [(t[i], child)])
    m.add_arc(m.root, t[0], child)
    return m


def build_from_gcs(g: Gcs) -> Mdd:
    """Chain MDD: one node per layer, ``|val[i]|`` parallel arcs between them."""
    m = Mdd(g.domains)
    child = m.tt
    for i in range(m.r - 1, 0, -1):
        child = m.make_node(i, [(v, child) for v in g.sets[i]])
    for v in g.sets[0]:
        m.add_arc(m.root, v, child)
    return m


def build_from_tuple_sequence(s: TupleSequence, reduce: bool = True) -> Mdd:
    """MDD of a lexicographic slice of a GCS.

    The paths of ``tmin`` and ``tmax`` are laid down first (sharing nodes
    while the two tuples agree); every value strictly above ``tmin[i]`` on
    the min path, strictly below ``tmax[i]`` on the max path, or strictly
    between them on the last shared node, leads to the wildcard node of the
    next layer, and wildcard nodes accept every GCS value below them.

    With ``reduce=False`` the raw construction is returned (at most
    ``3(r-1) + 2`` nodes).
    """
    vals = s.gcs.sets
    tmin, tmax = s.tmin, s.tmax
    m = Mdd(s.domains)
    r = m.r
    k = next((i for i in range(r) if tmin[i] != tmax[i]), r)
    wild: list[int | None] = [None] * (r + 1)
    wild[r] = m.tt

    def node_at(layer: int) -> int:
        return m.tt if layer == r else m.new_node(layer)

    def to_wild(src: int, layer: int, labels) -> None:
        for a in labels:
            if wild[layer] is None:
                wild[layer] = m.new_node(layer)
            m.add_arc(src, a, wild[layer])

    shared = m.root
    lo = hi = None
    for i in range(r):
        if wild[i] is not None:
            to_wild(wild[i], i + 1, vals[i])
        if i < k:
            nxt = node_at(i + 1)
            m.add_arc(shared, tmin[i], nxt)
            shared = nxt
        elif i == k:
            lo, hi = node_at(i + 1), node_at(i + 1)
            m.add_arc(shared, tmin[i], lo)
            m.add_arc(shared, tmax[i], hi)
            to_wild(shared, i + 1, [a for a in vals[i] if tmin[i] < a < tmax[i]])
        else:
            lo_next, hi_next = node_at(i + 1), node_at(i + 1)
            m.add_arc(lo, tmin[i], lo_next)
            to_wild(lo, i + 1, [a for a in vals[i] if a > tmin[i]])
            m.add_arc(hi, tmax[i], hi_next)
            to_wild(hi, i + 1, [a for a in vals[i] if a < tmax[i]])
            lo, hi = lo_next, hi_next
    if reduce:
        m.reduce()
    return m


def _check_disjoint(seqs: Sequence[TupleSequence]) -> None:
    seen: dict[tuple[int, ...], int] = {}
    for j, s in enumerate(seqs):
        for t in build_from_tuple_sequence(s).iter_tuples():
            if t in seen:
                raise NotDisjointError(f"sequences {seen[t]} and {j} share tuple {t}")
            seen[t] = j


def build_from_disjoint_sequences(seqs: Sequence[TupleSequence], check: bool = False,
                                  reduce: bool = True) -> Mdd:
    """One MDD for a set of pairwise disjoint tuple sequences.

    The per-sequence graphs are glued on a shared root and tt.  A sequence
    whose first-layer labels collide with ones already on the shared root
    cannot be glued without breaking determinism; it is folded in with
    :func:`mddkit.editops.add_set` instead (``reduce=False`` refuses this).
    ``check`` enumerates every sequence to verify disjointness.
    """
    if not seqs:
        raise DescriptorError("no sequences given")
    domains = seqs[0].domains
    for s in seqs:
        if s.domains != domains:
            raise ScopeError(f"sequence domains {s.domains} differ from {domains}")
    if check:
        _check_disjoint(seqs)
    m = Mdd(domains)
    late = []
    for s in seqs:
        g = build_from_tuple_sequence(s, reduce=False)
        if set(g.children(g.root)) & set(m.children(m.root)):
            late.append(s)
            continue
        ids = {g.root: m.root, g.tt: m.tt}
        for n in g.nodes():
            if n not in ids:
                ids[n] = m.new_node(g.layer_of(n))
        for n, v, c in g.arcs():
            m.add_arc(ids[n], v, ids[c])
    if not reduce:
        if late:
            raise MddError("sequences collide on the root; an unreduced merge is impossible")
        return m
    m.reduce()
    if late:
        from .editops import add_set
        for s in late:
            add_set(m, build_from_tuple_sequence(s))
    return m


def gcs_tuples(g: Gcs):
    return product(*g.sets)
