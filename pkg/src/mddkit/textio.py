"""Line-oriented text formats: tables, GCSs, sequences, problems, scripts.

Every format is whitespace separated with ``#`` comments.  Blocks can be
nested inline in a problem file; a table block ends at the first line that
does not start with an integer.
"""
from __future__ import annotations

from typing import Iterable

from .builders import (Gcs, TupleSequence, build_from_disjoint_sequences, build_from_gcs,
                       build_from_tuple_sequence, build_from_tuples)
from .core import (DescriptorError, Mdd, MddError, ParseError, ScopeError, TupleTable, _ints,
                   _tokens, from_raw, parse_raw)
from .solver import Constraint, Deletion, Problem

FORMATS = ("table", "gcs", "seq", "seqset", "mdd")


class Lines:
    """Cursor over ``(line_no, words)`` pairs."""

    def __init__(self, text: str):
        self.items = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else None

    def next(self, what: str):
        item = self.peek()
        if item is None:
            last = self.items[-1][0] if self.items else None
            raise ParseError(f"unexpected end of input, expected {what}", last)
        self.i += 1
        return item

    def expect(self, keyword: str, n_args: int | None = None) -> tuple[int, list[int]]:
        no, words = self.next(f"'{keyword}'")
        if words[0] != keyword:
            raise ParseError(f"expected '{keyword}', got {words[0]!r}", no)
        args = _ints(words[1:], no)
        if n_args is not None and len(args) != n_args:
            raise ParseError(f"'{keyword}' takes {n_args} value(s), got {len(args)}", no)
        return no, args

    def done(self) -> bool:
        return self.peek() is None

    def finish(self) -> None:
        item = self.peek()
        if item is not None:
            raise ParseError(f"unexpected trailing line starting with {item[1][0]!r}", item[0])


def _semantic(no: int, err: MddError) -> MddError:
    return type(err)(f"line {no}: {err}")


def _header(lines: Lines, keyword: str) -> tuple[int, tuple[int, ...]]:
    no, (r,) = lines.expect(keyword, 1)
    _, doms = lines.expect("domains", r)
    return no, tuple(doms)


def _is_row(item) -> bool:
    if item is None:
        return False
    w = item[1][0]
    return w.lstrip("-").isdigit()


def read_table(lines: Lines) -> TupleTable:
    no, doms = _header(lines, "table")
    rows = []
    while _is_row(lines.peek()):
        rno, words = lines.next("row")
        row = _ints(words, rno)
        if len(row) != len(doms):
            raise ParseError(f"row has {len(row)} values, expected {len(doms)}", rno)
        for v, d in zip(row, doms):
            if not 0 <= v < d:
                raise ScopeError(f"line {rno}: value {v} outside domain 0..{d - 1}")
        rows.append(tuple(row))
    try:
        return TupleTable(doms, rows)
    except MddError as e:
        raise _semantic(no, e) from None


def read_gcs(lines: Lines) -> Gcs:
    no, doms = _header(lines, "gcs")
    sets = []
    for _ in doms:
        sno, words = lines.next("'set'")
        if words[0] != "set":
            raise ParseError(f"expected 'set', got {words[0]!r}", sno)
        vals = _ints(words[1:], sno)
        if not vals or vals[0] != len(vals) - 1:
            raise ParseError("'set <k> v1 .. vk' has a wrong count", sno)
        sets.append(vals[1:])
    try:
        return Gcs(doms, sets)
    except MddError as e:
        raise _semantic(no, e) from None


def read_sequence(lines: Lines) -> TupleSequence:
    g = read_gcs(lines)
    no, tmin = lines.expect("tmin", len(g.domains))
    _, tmax = lines.expect("tmax", len(g.domains))
    try:
        return TupleSequence(g, tmin, tmax)
    except MddError as e:
        raise _semantic(no, e) from None


def read_seqset(lines: Lines) -> list[TupleSequence]:
    no, (count,) = lines.expect("seqset", 1)
    if count < 1:
        raise DescriptorError(f"line {no}: a sequence set needs at least one sequence")
    return [read_sequence(lines) for _ in range(count)]


def read_mdd(lines: Lines) -> Mdd:
    start = lines.i
    lines.next("'mdd'")
    lines.next("'domains'")
    while lines.peek() is not None and lines.peek()[1][0] in ("node", "arc"):
        lines.i += 1
    return from_raw(parse_raw(lines.items[start:lines.i]))


def read_block(lines: Lines) -> Mdd:
    """Any of the five block kinds, as a reduced MDD."""
    item = lines.peek()
    if item is None:
        raise ParseError("expected a table, gcs, seqset or mdd block", None)
    kind = item[1][0]
    if kind == "table":
        return _table_mdd(read_table(lines))
    if kind == "gcs":
        g = read_gcs(lines)
        if lines.peek() is not None and lines.peek()[1][0] == "tmin":
            _, tmin = lines.expect("tmin", len(g.domains))
            no, tmax = lines.expect("tmax", len(g.domains))
            try:
                return build_from_tuple_sequence(TupleSequence(g, tmin, tmax))
            except MddError as e:
                raise _semantic(no, e) from None
        return build_from_gcs(g)
    if kind == "seqset":
        return build_from_disjoint_sequences(read_seqset(lines))
    if kind == "mdd":
        return read_mdd(lines)
    raise ParseError(f"unknown block kind {kind!r}", item[0])


def _table_mdd(t: TupleTable) -> Mdd:
    return build_from_tuples(t.domains, t.rows)


def parse_input(text: str, fmt: str, check_disjoint: bool = False) -> Mdd:
    """Parse a whole file of format ``fmt`` and build its reduced MDD."""
    if fmt not in FORMATS:
        raise ParseError(f"unknown format {fmt!r}")
    lines = Lines(text)
    first = lines.peek()
    if first is None:
        raise ParseError("empty input")
    if fmt == "table":
        mdd = _table_mdd(read_table(lines))
    elif fmt == "gcs":
        mdd = build_from_gcs(read_gcs(lines))
    elif fmt == "seq":
        mdd = build_from_tuple_sequence(read_sequence(lines))
    elif fmt == "seqset":
        mdd = build_from_disjoint_sequences(read_seqset(lines), check=check_disjoint)
    else:
        mdd = read_mdd(lines)
    lines.finish()
    return mdd


def parse_table(text: str) -> TupleTable:
    lines = Lines(text)
    t = read_table(lines)
    lines.finish()
    return t


def read_script(lines: Lines, constraints: list[Constraint]) -> list[Deletion]:
    script = []
    while lines.peek() is not None and lines.peek()[1][0] == "delete_at":
        no, (trig, ci) = lines.expect("delete_at", 2)
        t = read_table(lines)
        if not 0 <= ci < len(constraints):
            raise DescriptorError(f"line {no}: no constraint {ci}")
        if t.domains != constraints[ci].mdd.domains:
            raise ScopeError(f"line {no}: deletion domains {t.domains} differ from "
                             f"constraint {ci} domains {constraints[ci].mdd.domains}")
        script.append(Deletion(trig, ci, list(t.rows)))
    return script


def parse_problem(text: str, script_text: str | None = None) -> Problem:
    lines = Lines(text)
    no, doms = _header(lines, "problem")
    constraints: list[Constraint] = []
    while lines.peek() is not None and lines.peek()[1][0] == "constraint":
        cno, args = lines.expect("constraint")
        if not args or args[0] != len(args) - 1:
            raise ParseError("'constraint <k> <vars>' has a wrong count", cno)
        vs = tuple(args[1:])
        for x in vs:
            if not 0 <= x < len(doms):
                raise ScopeError(f"line {cno}: variable {x} outside 0..{len(doms) - 1}")
        mdd = read_block(lines)
        want = tuple(doms[x] for x in vs)
        if mdd.domains != want:
            raise ScopeError(f"line {cno}: block domains {mdd.domains} differ from variable domains {want}")
        constraints.append(Constraint(vs, mdd))
    script = read_script(lines, constraints)
    lines.finish()
    if script_text is not None:
        extra = Lines(script_text)
        script += read_script(extra, constraints)
        extra.finish()
    try:
        return Problem(doms, constraints, script)
    except MddError as e:
        raise _semantic(no, e) from None


def format_table(t: TupleTable | Iterable, domains=None) -> str:
    if not isinstance(t, TupleTable):
        t = TupleTable(domains, list(t))
    out = [f"table {len(t.domains)}", "domains " + " ".join(map(str, t.domains))]
    out += [" ".join(map(str, row)) for row in t.rows]
    return "\n".join(out) + "\n"


def format_gcs(g: Gcs) -> str:
    out = [f"gcs {len(g.domains)}", "domains " + " ".join(map(str, g.domains))]
    out += [f"set {len(s)} " + " ".join(map(str, s)) for s in g.sets]
    return "\n".join(out) + "\n"


def format_sequence(s: TupleSequence) -> str:
    return (format_gcs(s.gcs) + "tmin " + " ".join(map(str, s.tmin)) + "\n"
            + "tmax " + " ".join(map(str, s.tmax)) + "\n")
