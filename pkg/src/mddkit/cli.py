"""Command line: ``mddkit {build,edit,query,solve,bench}``.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 semantic error (scope or
descriptor), 4 no solution when one was required.
"""
from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from .builders import build_from_tuple_sequence
from .core import MddError, ParseError, validate
from .editops import add_set, delete_set
from .solver import Search
from .textio import FORMATS, Lines, parse_input, parse_problem, read_sequence

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SEMANTIC, EXIT_UNSAT = 0, 1, 2, 3, 4

FORMAT_HELP = """\
input formats (whitespace separated, '#' starts a comment):
  table   'table <r>', 'domains <d1> .. <dr>', then one row of r values per line
  gcs     'gcs <r>', 'domains ...', then r lines 'set <k> <v1> .. <vk>'
  seq     a gcs block followed by 'tmin <r values>' and 'tmax <r values>'
  seqset  'seqset <count>' followed by that many seq blocks (pairwise disjoint)
  mdd     'mdd 1 <r>', 'domains ...', then 'node <id> <layer>' and
          'arc <src> <label> <dst>' lines (root is 0, tt is 1)
problem files:
  'problem <n>', 'domains <d1> .. <dn>', then per constraint
  'constraint <k> <x1> .. <xk>' followed by one table/gcs/seq/seqset/mdd
  block over those variables, then optional script lines
  'delete_at <node-count> <constraint-index>' each followed by a table block
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from None


def _stats(mdd) -> str:
    return f"tuples={mdd.count()} nodes={mdd.n_nodes} arcs={mdd.n_arcs}"


def cmd_build(args) -> int:
    text = _read(args.input)
    mdd = parse_input(text, args.format, check_disjoint=args.check_disjoint)
    line = _stats(mdd)
    if args.format == "seq":
        raw = build_from_tuple_sequence(read_sequence(Lines(text)), reduce=False)
        line += f" raw_nodes={raw.n_nodes} raw_arcs={raw.n_arcs}"
    if args.output:
        _write(args.output, mdd.dumps())
    print(line)
    return EXIT_OK


def cmd_edit(args) -> int:
    mdd = load_mdd(args.mdd)
    edit = parse_input(_read(args.input), args.format)
    op = add_set if args.op == "add" else delete_set
    summary = op(mdd, edit)
    _write(args.output, mdd.dumps())
    print(f"{_stats(mdd)} nodes_created={summary.nodes_created} nodes_deleted={summary.nodes_deleted} "
          f"arcs_created={summary.arcs_created} arcs_deleted={summary.arcs_deleted} "
          f"changed={int(summary.changed)}")
    return EXIT_OK


def load_mdd(path: str):
    return parse_input(_read(path), "mdd")


def cmd_query(args) -> int:
    mdd = load_mdd(args.mdd)
    report = validate(mdd)
    print(_stats(mdd) + f" valid={int(report.ok)}")
    for t in args.contains or ():
        try:
            vals = tuple(int(x) for x in t.replace(",", " ").split())
        except ValueError:
            raise UsageError(f"bad tuple {t!r}") from None
        print(f"contains {' '.join(map(str, vals))} = {int(mdd.contains(mdd.scope.check_tuple(vals)))}")
    if args.enumerate:
        for t in mdd.iter_tuples():
            print(" ".join(map(str, t)))
    return EXIT_OK


def cmd_solve(args) -> int:
    script = _read(args.script) if args.script else None
    problem = parse_problem(_read(args.problem), script)
    res = Search(problem, args.backend, args.check).run(first_only=not args.all)
    if args.all:
        print(f"solutions={res.count}")
        if args.list:
            for s in res.solutions:
                print(" ".join(map(str, s)))
    else:
        print("solution=" + (" ".join(map(str, res.solutions[0])) if res.solutions else "none"))
    st = res.stats.as_dict()
    print("stats " + " ".join(f"{k}={v}" for k, v in st.items()))
    if not args.all and not res.solutions:
        return EXIT_UNSAT
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        tight = [float(x) for x in args.tightness.split(",")]
    except ValueError:
        raise UsageError(f"bad tightness list {args.tightness!r}") from None
    if args.arity < 1 or args.dsize < 1 or args.deletions < 0 or args.seeds < 1:
        raise UsageError("arity, dsize and seeds must be positive, deletions non-negative")
    try:
        text = bench_mod.bench_csv(range(args.seed, args.seed + args.seeds), args.arity, args.dsize,
                                   tight, args.deletions, timing=not args.no_timing,
                                   search=not args.no_search)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mddkit", description="Build, edit, query and solve with MDD constraints.",
                epilog=FORMAT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build a reduced MDD from a descriptor file",
                       epilog=FORMAT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("--input", required=True)
    b.add_argument("--format", choices=FORMATS, default="table")
    b.add_argument("--output", help="where to write the canonical MDD")
    b.add_argument("--check-disjoint", action="store_true",
                   help="seqset only: verify the sequences are pairwise disjoint (enumerates them)")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("edit", help="add or delete a tuple set in place",
                       epilog=FORMAT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--mdd", required=True)
    e.add_argument("--op", choices=("add", "delete"), required=True)
    e.add_argument("--input", required=True, help="the tuple set to add or delete")
    e.add_argument("--format", choices=FORMATS, default="table", help="format of --input")
    e.add_argument("--output", required=True)
    e.set_defaults(func=cmd_edit)

    q = sub.add_parser("query", help="statistics, membership and enumeration")
    q.add_argument("--mdd", required=True)
    q.add_argument("--contains", action="append", metavar="TUPLE", help='e.g. "0 1 2"; repeatable')
    q.add_argument("--enumerate", action="store_true", help="print every tuple")
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("solve", help="search a problem file",
                       epilog=FORMAT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--problem", required=True)
    s.add_argument("--all", action="store_true", help="count every solution")
    s.add_argument("--list", action="store_true", help="with --all, print the solutions too")
    s.add_argument("--script", help="extra 'delete_at' lines")
    s.add_argument("--backend", choices=("mdd", "table"), default="mdd")
    s.add_argument("--check", action="store_true", help="verify deleted tuples stay deleted at every node")
    s.set_defaults(func=cmd_solve)

    k = sub.add_parser("bench", help="random-instance benchmark, CSV output")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    k.add_argument("--arity", type=int, default=6)
    k.add_argument("--dsize", type=int, default=5)
    k.add_argument("--tightness", default="0.08,0.15,0.25", help="comma separated fractions")
    k.add_argument("--deletions", type=int, default=100)
    k.add_argument("--csv", help="output file (default stdout)")
    k.add_argument("--no-timing", action="store_true", help="leave timing columns empty")
    k.add_argument("--no-search", action="store_true", help="skip the search columns")
    k.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except MddError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
