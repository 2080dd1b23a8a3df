"""Random instances and the modification / search benchmarks behind ``bench``."""
from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from .builders import build_from_tuples
from .editops import delete_tuple
from .solver import Deletion, single, solve_all
from .sparse import SparseFamily, Trail

SCHEMA = 1
COLUMNS = ["schema", "seed", "arity", "dsize", "tightness", "tuples", "deletions",
           "mdd_nodes", "mdd_arcs", "build_s", "mdd_modifications", "table_modifications",
           "mdd_solve_s", "table_solve_s", "solutions", "nodes_visited"]


def random_table(seed: int, r: int, d: int, tightness: float) -> list[tuple[int, ...]]:
    """``round(tightness * d**r)`` distinct tuples drawn uniformly, sorted."""
    if not 0 <= tightness <= 1:
        raise ValueError(f"tightness {tightness} outside [0, 1]")
    rng = random.Random(seed)
    n = round(tightness * d ** r)
    rows = []
    for code in rng.sample(range(d ** r), n):
        t = []
        for _ in range(r):
            code, v = divmod(code, d)
            t.append(v)
        rows.append(tuple(reversed(t)))
    rows.sort()
    return rows


def deletion_order(seed: int, rows: Sequence[tuple[int, ...]], k: int) -> list[tuple[int, ...]]:
    if k > len(rows):
        raise ValueError(f"cannot delete {k} of {len(rows)} tuples")
    return random.Random(seed + 1_000_003).sample(list(rows), k)


def mdd_modifications(domains: Sequence[int], rows, doomed) -> list[int]:
    """Delete ``doomed`` one tuple at a time; cumulative modification counts."""
    m = build_from_tuples(domains, rows)
    total, out = 0, []
    for t in doomed:
        total += delete_tuple(m, t).modifications
        out.append(total)
    return out


def table_modifications(domains: Sequence[int], rows, doomed) -> list[int]:
    """Same deletions against per-(variable, value) support lists of a table."""
    r = len(domains)
    offset = [sum(domains[:i]) for i in range(r)]
    index = {t: i for i, t in enumerate(rows)}
    groups = [[] for _ in range(sum(domains))]
    for ti, t in enumerate(rows):
        for i, v in enumerate(t):
            groups[offset[i] + v].append(ti * r + i)
    sup = SparseFamily(groups, len(rows) * r)
    trail = Trail()
    total, out = 0, []
    for t in doomed:
        ti = index[t]
        for i, v in enumerate(t):
            k = offset[i] + v
            if sup.contains(k, ti * r + i):
                sup.remove(k, ti * r + i, trail)
                total += 1
        out.append(total)
    return out


@dataclass
class BenchRow:
    values: dict

    def as_list(self) -> list:
        return [self.values.get(c, "") for c in COLUMNS]


def run_instance(seed: int, r: int, d: int, tightness: float, k: int,
                 timing: bool = True, search: bool = True) -> BenchRow:
    rows = random_table(seed, r, d, tightness)
    domains = [d] * r
    t0 = time.perf_counter()
    mdd = build_from_tuples(domains, rows)
    build_s = time.perf_counter() - t0
    v = {"schema": SCHEMA, "seed": seed, "arity": r, "dsize": d, "tightness": tightness,
         "tuples": len(rows), "deletions": k, "mdd_nodes": mdd.n_nodes, "mdd_arcs": mdd.n_arcs}
    if timing:
        v["build_s"] = f"{build_s:.4f}"
    doomed = deletion_order(seed, rows, k)
    if k:
        v["mdd_modifications"] = mdd_modifications(domains, rows, doomed)[-1]
        v["table_modifications"] = table_modifications(domains, rows, doomed)[-1]
    if search:
        # spread the deletions over the first len(rows) search nodes
        step = max(1, len(rows) // max(k, 1))
        script = [Deletion(1 + i * step, 0, [t]) for i, t in enumerate(doomed)]
        res = solve_all(single(mdd, script), backend="mdd")
        base = solve_all(single(mdd, script), backend="table")
        if res.solutions != base.solutions:
            raise AssertionError("backends disagree")
        v["solutions"] = res.count
        v["nodes_visited"] = res.stats.nodes_visited
        if timing:
            v["mdd_solve_s"] = f"{res.stats.seconds:.4f}"
            v["table_solve_s"] = f"{base.stats.seconds:.4f}"
    return BenchRow(v)


def bench_csv(seeds: Sequence[int], r: int, d: int, tightness: Sequence[float], k: int,
              timing: bool = True, search: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for seed in seeds:
        for t in tightness:
            w.writerow(run_instance(seed, r, d, t, k, timing, search).as_list())
    return buf.getvalue()


def linear_r2(xs: Sequence[float], ys: Sequence[float]) -> float:
    """R² of the least-squares line through the points."""
    return statistics.correlation(xs, ys) ** 2
