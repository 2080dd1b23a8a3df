"""Layered multi-valued decision diagrams.

An :class:`Mdd` over ``r`` variables has ``r + 1`` layers of nodes.  Layer 0
holds the root, layer ``r`` holds the true terminal ``tt``; an arc leaving a
node of layer ``i`` carries a value of variable ``i`` (0-based) and enters a
node of layer ``i + 1``.  Every root-to-tt path spells one accepted tuple.

Nodes are small integers handed out by a per-diagram allocator with a free
list.  Each node keeps its outgoing arcs as a ``label -> child`` dict and its
incoming arcs as a set of ``(parent, label)`` pairs.

Reduction uses a unique table mapping outgoing signatures to nodes.  The
table is kept up to date across in-place edits: whenever a node's outgoing
arcs change it is dropped from the table and queued as *dirty*, so a later
:meth:`Mdd.incremental_reduce` only has to look at the dirty nodes (plus any
parents a merge cascades into).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class MddError(Exception):
    """Base class for all errors raised by this package."""


class ScopeError(MddError):
    """Arity or domain mismatch between a tuple/diagram and a scope."""


class DescriptorError(MddError):
    """Invalid GCS / tuple-sequence descriptor."""


class ParseError(MddError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Scope:
    domains: tuple[int, ...]

    def __post_init__(self):
        if len(self.domains) < 1:
            raise ScopeError("a scope needs at least one variable")
        if any(int(d) < 1 for d in self.domains):
            raise ScopeError(f"domain sizes must be >= 1, got {self.domains}")

    @property
    def arity(self) -> int:
        return len(self.domains)

    @property
    def dmax(self) -> int:
        return max(self.domains)

    def universe_size(self) -> int:
        n = 1
        for d in self.domains:
            n *= d
        return n

    def check_tuple(self, t: Sequence[int]) -> tuple[int, ...]:
        t = tuple(t)
        if len(t) != len(self.domains):
            raise ScopeError(f"tuple {t} has arity {len(t)}, expected {len(self.domains)}")
        for v, d in zip(t, self.domains):
            if not 0 <= v < d:
                raise ScopeError(f"tuple {t} has value {v} outside domain 0..{d - 1}")
        return t


@dataclass
class TupleTable:
    """An explicit collection of tuples over a scope."""

    domains: tuple[int, ...]
    rows: list[tuple[int, ...]] = field(default_factory=list)
    is_sorted: bool = False

    def __post_init__(self):
        self.domains = tuple(self.domains)
        scope = Scope(self.domains)
        self.rows = [scope.check_tuple(t) for t in self.rows]

    @property
    def scope(self) -> Scope:
        return Scope(self.domains)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.rows)

    def sort(self) -> None:
        """Sort and deduplicate the rows in place."""
        if not self.is_sorted:
            self.rows = sorted(set(self.rows))
            self.is_sorted = True


@dataclass
class ChangeSummary:
    nodes_created: int = 0
    nodes_deleted: int = 0
    arcs_created: int = 0
    arcs_deleted: int = 0

    @property
    def modifications(self) -> int:
        return self.nodes_created + self.nodes_deleted + self.arcs_created + self.arcs_deleted

    @property
    def changed(self) -> bool:
        return self.modifications > 0

    def copy(self) -> "ChangeSummary":
        return ChangeSummary(self.nodes_created, self.nodes_deleted,
                             self.arcs_created, self.arcs_deleted)

    def __sub__(self, other: "ChangeSummary") -> "ChangeSummary":
        return ChangeSummary(self.nodes_created - other.nodes_created,
                             self.nodes_deleted - other.nodes_deleted,
                             self.arcs_created - other.arcs_created,
                             self.arcs_deleted - other.arcs_deleted)


class Mdd:
    """A mutable layered MDD.  Single owner; reads are safe to share."""

    def __init__(self, domains: Iterable[int]):
        self.scope = Scope(tuple(int(d) for d in domains))
        r = self.scope.arity
        self._out: list[dict[int, int] | None] = []
        self._in: list[set[tuple[int, int]] | None] = []
        self._layer: list[int] = []
        self._sig: list[tuple | None] = []
        self._free: list[int] = []
        self.layers: list[set[int]] = [set() for _ in range(r + 1)]
        self._unique: dict[tuple, int] = {}
        self._dirty: list[set[int]] = [set() for _ in range(r + 1)]
        self._suspects: set[int] = set()
        self.counts = ChangeSummary()
        self.n_arcs = 0
        self.root = self.new_node(0)
        self.tt = self.new_node(r)
        # root and tt are fixed; their creation is not an edit
        self.counts = ChangeSummary()

    # -- basic structure ---------------------------------------------------

    @property
    def r(self) -> int:
        return self.scope.arity

    @property
    def domains(self) -> tuple[int, ...]:
        return self.scope.domains

    @property
    def n_nodes(self) -> int:
        return len(self._layer) - len(self._free)

    def layer_of(self, n: int) -> int:
        return self._layer[n]

    def children(self, n: int) -> dict[int, int]:
        """The ``label -> child`` map of ``n``.  Do not mutate."""
        return self._out[n]

    def parents(self, n: int) -> set[tuple[int, int]]:
        """The ``(parent, label)`` pairs entering ``n``.  Do not mutate."""
        return self._in[n]

    def is_live(self, n: int) -> bool:
        return 0 <= n < len(self._out) and self._out[n] is not None

    def nodes(self) -> Iterator[int]:
        for layer in self.layers:
            yield from sorted(layer)

    def arcs(self) -> Iterator[tuple[int, int, int]]:
        for n in self.nodes():
            for v, c in sorted(self._out[n].items()):
                yield n, v, c

    def is_empty(self) -> bool:
        return not self._out[self.root]

    def new_node(self, layer: int) -> int:
        if self._free:
            n = self._free.pop()
            self._out[n] = {}
            self._in[n] = set()
            self._layer[n] = layer
            self._sig[n] = None
        else:
            n = len(self._out)
            self._out.append({})
            self._in.append(set())
            self._layer.append(layer)
            self._sig.append(None)
        self.layers[layer].add(n)
        self.counts.nodes_created += 1
        return n

    def _touch(self, n: int) -> None:
        """Mark ``n``'s outgoing signature as changed."""
        lay = self._layer[n]
        if lay == 0 or n == self.tt:
            return
        sig = self._sig[n]
        if sig is not None:
            if self._unique.get(sig) == n:
                del self._unique[sig]
            self._sig[n] = None
        self._dirty[lay].add(n)

    def add_arc(self, src: int, label: int, dst: int) -> None:
        out = self._out[src]
        if label in out:
            raise MddError(f"node {src} already has an arc labeled {label}")
        if self._layer[dst] != self._layer[src] + 1:
            raise MddError(f"arc {src}-{label}->{dst} does not go to the next layer")
        self._touch(src)
        out[label] = dst
        self._in[dst].add((src, label))
        self.n_arcs += 1
        self.counts.arcs_created += 1

    def remove_arc(self, src: int, label: int) -> int:
        dst = self._out[src].pop(label)
        self._in[dst].discard((src, label))
        self._touch(src)
        self._suspects.add(src)
        self._suspects.add(dst)
        self.n_arcs -= 1
        self.counts.arcs_deleted += 1
        return dst

    def _free_node(self, n: int) -> None:
        sig = self._sig[n]
        if sig is not None and self._unique.get(sig) == n:
            del self._unique[sig]
        lay = self._layer[n]
        self.layers[lay].discard(n)
        self._dirty[lay].discard(n)
        self._out[n] = None
        self._in[n] = None
        self._sig[n] = None
        self._free.append(n)
        self.counts.nodes_deleted += 1

    def delete_node(self, n: int) -> None:
        """Remove ``n`` together with all arcs touching it."""
        if n in (self.root, self.tt):
            raise MddError("root and tt cannot be deleted")
        for p, v in list(self._in[n]):
            self.remove_arc(p, v)
        for v in list(self._out[n]):
            self.remove_arc(n, v)
        self._free_node(n)

    def sweep(self, candidates: Iterable[int] = ()) -> int:
        """Delete nodes left without incoming or outgoing arcs, cascading.

        Returns the number of nodes deleted.
        """
        work = self._suspects
        work.update(candidates)
        deleted = 0
        while work:
            n = work.pop()
            if n == self.root or n == self.tt or self._out[n] is None:
                continue
            if not self._out[n] or not self._in[n]:
                self.delete_node(n)
                deleted += 1
        return deleted

    # -- hash consing ------------------------------------------------------

    def signature(self, n: int) -> tuple:
        out = self._out[n]
        sig = []
        for v in sorted(out):
            sig.append(v)
            sig.append(out[v])
        return tuple(sig)

    def make_node(self, layer: int, arcs: Sequence[tuple[int, int]]) -> int:
        """Return the node of ``layer`` with exactly ``arcs``, creating it if needed.

        ``arcs`` must be sorted by label and non-empty.  Only valid on a
        reduced diagram (the unique table must be complete).
        """
        sig = tuple(x for arc in arcs for x in arc)
        n = self._unique.get(sig)
        if n is not None:
            return n
        n = self.new_node(layer)
        out = self._out[n]
        for v, c in arcs:
            out[v] = c
            self._in[c].add((n, v))
        self.n_arcs += len(arcs)
        self.counts.arcs_created += len(arcs)
        self._unique[sig] = n
        self._sig[n] = sig
        return n

    @property
    def is_reduced(self) -> bool:
        return not self._suspects and not any(self._dirty)

    def _merge_into(self, n: int, keep: int) -> None:
        for p, v in sorted(self._in[n]):
            self.remove_arc(p, v)
            self.add_arc(p, v, keep)
        for v in list(self._out[n]):
            self.remove_arc(n, v)
        self._free_node(n)

    def incremental_reduce(self, frontier: Iterable[int] = ()) -> int:
        """Merge equivalent nodes, looking only at dirty and frontier nodes.

        Layers are processed bottom-up; a merge dirties the parents of the
        absorbed node, which are picked up when their layer is processed.
        Returns the number of nodes examined.
        """
        frontier = list(frontier)
        self.sweep(frontier)
        for n in frontier:
            if self.is_live(n):
                self._touch(n)
        examined = 0
        unique = self._unique
        for lay in range(self.r - 1, 0, -1):
            # merges only dirty the layer above, so this bucket is final
            bucket = self._dirty[lay]
            self._dirty[lay] = set()
            for n in sorted(bucket):
                examined += 1
                if not self._out[n]:
                    continue
                sig = self.signature(n)
                other = unique.get(sig)
                if other is None:
                    unique[sig] = n
                    self._sig[n] = sig
                elif other != n:
                    self._merge_into(n, other)
        self._dirty[0].clear()
        self._suspects.clear()
        return examined

    def reduce(self) -> "Mdd":
        """Full reduction: rebuild the unique table from scratch."""
        self.sweep()
        self._unique.clear()
        for lay in range(1, self.r):
            for n in self.layers[lay]:
                self._sig[n] = None
            self._dirty[lay] = set(self.layers[lay])
        self.incremental_reduce()
        return self

    # -- queries -----------------------------------------------------------

    def contains(self, t: Sequence[int]) -> bool:
        t = self.scope.check_tuple(t)
        n = self.root
        for v in t:
            n = self._out[n].get(v)
            if n is None:
                return False
        return n == self.tt

    __contains__ = contains

    def count(self) -> int:
        """Number of accepted tuples (bottom-up path count)."""
        memo = {self.tt: 1}
        for lay in range(self.r - 1, -1, -1):
            for n in self.layers[lay]:
                memo[n] = sum(memo.get(c, 0) for c in self._out[n].values())
        return memo[self.root]

    def __len__(self) -> int:
        return self.count()

    def iter_tuples(self) -> Iterator[tuple[int, ...]]:
        """Accepted tuples in increasing lexicographic order."""
        if self.is_empty():
            return
        out = self._out
        prefix: list[int] = []
        stack = [iter(sorted(out[self.root].items()))]
        while stack:
            step = next(stack[-1], None)
            if step is None:
                stack.pop()
                if prefix:
                    prefix.pop()
                continue
            v, c = step
            if c == self.tt:
                yield tuple(prefix) + (v,)
                continue
            prefix.append(v)
            stack.append(iter(sorted(out[c].items())))

    def enumerate(self) -> TupleTable:
        return TupleTable(self.domains, list(self.iter_tuples()), is_sorted=True)

    def copy(self) -> "Mdd":
        m = Mdd.__new__(Mdd)
        m.scope = self.scope
        m._out = [None if o is None else dict(o) for o in self._out]
        m._in = [None if i is None else set(i) for i in self._in]
        m._layer = list(self._layer)
        m._sig = list(self._sig)
        m._free = list(self._free)
        m.layers = [set(s) for s in self.layers]
        m._unique = dict(self._unique)
        m._dirty = [set(s) for s in self._dirty]
        m._suspects = set(self._suspects)
        m.counts = self.counts.copy()
        m.n_arcs = self.n_arcs
        m.root = self.root
        m.tt = self.tt
        return m

    def __repr__(self) -> str:
        return f"Mdd(domains={self.domains}, nodes={self.n_nodes}, arcs={self.n_arcs})"

    # -- canonical form ----------------------------------------------------

    def canonical_ids(self) -> dict[int, int]:
        """Renumber reachable nodes: root 0, tt 1, others by first visit of a
        label-ordered DFS from the root."""
        ids = {self.root: 0, self.tt: 1}
        nxt = 2
        out = self._out
        stack = [iter(sorted(out[self.root].items()))]
        while stack:
            step = next(stack[-1], None)
            if step is None:
                stack.pop()
                continue
            c = step[1]
            if c in ids:
                continue
            ids[c] = nxt
            nxt += 1
            stack.append(iter(sorted(out[c].items())))
        return ids

    def dumps(self) -> str:
        ids = self.canonical_ids()
        per_layer: list[list[tuple[int, int]]] = [[] for _ in range(self.r + 1)]
        for n, cid in ids.items():
            per_layer[self._layer[n]].append((cid, n))
        lines = [f"mdd 1 {self.r}", "domains " + " ".join(map(str, self.domains))]
        for lay, members in enumerate(per_layer):
            for cid, n in sorted(members):
                lines.append(f"node {cid} {lay}")
                for v, c in sorted(self._out[n].items()):
                    lines.append(f"arc {cid} {v} {ids[c]}")
        return "\n".join(lines) + "\n"

    def to_raw(self) -> "RawMdd":
        return RawMdd(
            domains=self.domains,
            nodes={n: self._layer[n] for lay in self.layers for n in lay},
            arcs=[(n, v, c) for n in self.nodes() for v, c in self._out[n].items()],
            root=self.root,
            tt=self.tt,
        )


def contains(mdd: Mdd, t: Sequence[int]) -> bool:
    return mdd.contains(t)


def count_tuples(mdd: Mdd) -> int:
    return mdd.count()


def enumerate_tuples(mdd: Mdd) -> TupleTable:
    return mdd.enumerate()


def equivalent(a: Mdd, b: Mdd) -> bool:
    """True iff both diagrams accept the same set (canonical forms match)."""
    if a.domains != b.domains:
        raise ScopeError(f"scope mismatch: {a.domains} vs {b.domains}")
    if not a.is_reduced:
        a = a.copy().reduce()
    if not b.is_reduced:
        b = b.copy().reduce()
    return a.dumps() == b.dumps()


def full_mdd(domains: Iterable[int]) -> Mdd:
    """The diagram accepting the whole Cartesian product (one node per layer)."""
    m = Mdd(domains)
    child = m.tt
    for lay in range(m.r - 1, 0, -1):
        child = m.make_node(lay, [(v, child) for v in range(m.domains[lay])])
    for v in range(m.domains[0]):
        m.add_arc(m.root, v, child)
    return m


def complement(mdd: Mdd) -> Mdd:
    """New reduced diagram accepting the scope's product minus ``mdd``'s set."""
    src = mdd if mdd.is_reduced else mdd.copy().reduce()
    res = Mdd(src.domains)
    r = res.r
    dom = res.domains
    full = [0] * (r + 1)
    full[r] = res.tt
    for lay in range(r - 1, 0, -1):
        full[lay] = res.make_node(lay, [(v, full[lay + 1]) for v in range(dom[lay])])

    # memo: source node -> complement node, or None for the empty set
    memo: dict[int, int | None] = {}
    for lay in range(r - 1, -1, -1):
        for n in sorted(src.layers[lay]):
            out = src.children(n)
            arcs = []
            for v in range(dom[lay]):
                c = out.get(v)
                if c is None:
                    arcs.append((v, full[lay + 1]))
                elif c != src.tt:
                    cc = memo[c]
                    if cc is not None:
                        arcs.append((v, cc))
            if lay == 0:
                for v, c in arcs:
                    res.add_arc(res.root, v, c)
            else:
                memo[n] = res.make_node(lay, arcs) if arcs else None
    # full[] nodes not used by the result must go
    res.sweep(full[1:r])
    res._suspects.clear()
    return res


# -- serialization -----------------------------------------------------------


def _tokens(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _ints(words: Sequence[str], line: int) -> list[int]:
    try:
        return [int(w) for w in words]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(words)!r}", line) from None


@dataclass
class RawMdd:
    """Unchecked node/arc listing; what :func:`validate` inspects."""

    domains: tuple[int, ...]
    nodes: dict[int, int]
    arcs: list[tuple[int, int, int]]
    root: int = 0
    tt: int = 1


def parse_raw(lines: Iterable[tuple[int, list[str]]]) -> RawMdd:
    """Parse ``mdd``/``domains``/``node``/``arc`` token lines."""
    it = iter(lines)
    try:
        no, words = next(it)
    except StopIteration:
        raise ParseError("empty MDD block") from None
    if words[0] != "mdd" or len(words) != 3:
        raise ParseError("expected 'mdd 1 <r>'", no)
    version, r = _ints(words[1:], no)
    if version != 1:
        raise ParseError(f"unsupported mdd format version {version}", no)
    try:
        no, words = next(it)
    except StopIteration:
        raise ParseError("missing domains line") from None
    if words[0] != "domains" or len(words) != r + 1:
        raise ParseError(f"expected 'domains' with {r} sizes", no)
    domains = tuple(_ints(words[1:], no))
    nodes: dict[int, int] = {}
    arcs: list[tuple[int, int, int]] = []
    for no, words in it:
        if words[0] == "node" and len(words) == 3:
            nid, lay = _ints(words[1:], no)
            if nid in nodes:
                raise ParseError(f"node {nid} declared twice", no)
            nodes[nid] = lay
        elif words[0] == "arc" and len(words) == 4:
            arcs.append(tuple(_ints(words[1:], no)))
        else:
            raise ParseError(f"unexpected line {' '.join(words)!r}", no)
    return RawMdd(domains, nodes, arcs)


def loads(text: str) -> Mdd:
    """Parse the canonical text format into a (reduced) :class:`Mdd`."""
    raw = parse_raw(_tokens(text))
    return from_raw(raw)


def from_raw(raw: RawMdd) -> Mdd:
    report = validate(raw)
    if not report.ok:
        raise ParseError("invalid MDD: " + "; ".join(report.violations))
    m = Mdd(raw.domains)
    ids = {raw.root: m.root, raw.tt: m.tt}
    for nid, lay in sorted(raw.nodes.items(), key=lambda kv: (kv[1], kv[0])):
        if nid not in ids:
            ids[nid] = m.new_node(lay)
    for s, v, c in raw.arcs:
        m.add_arc(ids[s], v, ids[c])
    m.counts = ChangeSummary()
    return m.reduce()


def load(path) -> Mdd:
    with open(path) as fh:
        return loads(fh.read())


def dump(mdd: Mdd, path) -> None:
    with open(path, "w") as fh:
        fh.write(mdd.dumps())


# -- validation --------------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(obj: "Mdd | RawMdd | str") -> ValidationReport:
    """Check the structural invariants of a diagram.

    Accepts an :class:`Mdd`, a :class:`RawMdd`, or serialized text.  The
    reducedness check only applies to an :class:`Mdd` that claims to be
    reduced.
    """
    check_reduced = isinstance(obj, Mdd) and obj.is_reduced
    if isinstance(obj, str):
        obj = parse_raw(_tokens(obj))
    raw = obj.to_raw() if isinstance(obj, Mdd) else obj
    report = ValidationReport()
    bad = report.violations.append
    try:
        scope = Scope(tuple(raw.domains))
    except ScopeError as exc:
        bad(str(exc))
        return report
    r = scope.arity
    nodes = raw.nodes
    if nodes.get(raw.root) != 0:
        bad(f"root {raw.root} is not a layer-0 node")
    if nodes.get(raw.tt) != r:
        bad(f"tt {raw.tt} is not a layer-{r} node")
    for n, lay in nodes.items():
        if not 0 <= lay <= r:
            bad(f"node {n} has layer {lay} outside 0..{r}")
        elif lay == 0 and n != raw.root:
            bad(f"node {n}: second node in root layer")
        elif lay == r and n != raw.tt:
            bad(f"node {n}: second node in terminal layer")
    out: dict[int, dict[int, int]] = {n: {} for n in nodes}
    n_in: dict[int, int] = {n: 0 for n in nodes}
    for s, v, c in raw.arcs:
        if s not in nodes or c not in nodes:
            bad(f"arc {s}-{v}->{c} touches an undeclared node")
            continue
        if nodes[c] != nodes[s] + 1:
            bad(f"arc {s}-{v}->{c} does not go to the next layer")
        if 0 <= nodes[s] < r and not 0 <= v < scope.domains[nodes[s]]:
            bad(f"arc {s}-{v}->{c} label outside domain")
        if v in out[s]:
            bad(f"node {s}: nondeterministic node (label {v} used twice)")
            continue
        out[s][v] = c
        n_in[c] += 1
    if raw.tt in out and out[raw.tt]:
        bad("tt has outgoing arcs")
    empty = raw.root in out and not out[raw.root]
    for n in nodes:
        if n in (raw.root, raw.tt):
            continue
        if not out[n]:
            bad(f"node {n}: node without outgoing arc")
        if not n_in[n]:
            bad(f"node {n}: node without incoming arc")
    if raw.tt in n_in and not n_in[raw.tt] and not empty:
        bad("tt unreachable in a non-empty diagram")
    if empty and len(nodes) > 2:
        bad("empty root but other nodes present")
    if check_reduced and report.ok:
        for lay in range(1, r):
            seen: dict[tuple, int] = {}
            for n in sorted(k for k, l in nodes.items() if l == lay):
                sig = tuple(sorted(out[n].items()))
                if sig in seen:
                    bad(f"nodes {seen[sig]} and {n} are equivalent in a reduced diagram")
                else:
                    seen[sig] = n
    return report
