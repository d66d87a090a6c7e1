"""
Benchmark harness: ConfDist against the pushdown baseline on the dense family.
"""
import csv
import io
import sys
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from confdist.core.constants import BENCH_CSV_COLUMNS, BENCH_REPETITIONS, DEFAULT_RELAXATION_CAP
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import singleton_automaton
from confdist.modules.module_confdist import post_star
from confdist.modules.module_generators import dense_family
from confdist.modules.module_rsm import Configuration, Rsm
from confdist.modules.module_semiring import Semiring, boolean_semiring
from confdist.modules.module_wpds import rsm_to_wpds, singleton_pautomaton, wpds_post_star
from confdist.utils.file_ops import safe_write_text


@dataclass
class BenchRow:
    n: int
    confdist_seconds: float
    wpds_seconds: float
    speedup: float
    confdist_ops: int
    wpds_ops: int

    def formatted(self) -> Tuple[str, ...]:
        return (
            str(self.n),
            f"{self.confdist_seconds:.6f}",
            f"{self.wpds_seconds:.6f}",
            f"{self.speedup:.3f}",
            str(self.confdist_ops),
            str(self.wpds_ops),
        )


def median_seconds(run: Callable[[], object], repetitions: int) -> float:
    timings = []
    for _ in range(repetitions):
        started = time.perf_counter()
        run()
        timings.append(time.perf_counter() - started)
    return float(np.median(timings))


def _engines(rsm: Rsm, relaxation_cap: int):
    c = Configuration(rsm.entries[0][0])
    wpds, corr = rsm_to_wpds(rsm)

    def confdist(stats: Optional[EngineStats] = None):
        return post_star(rsm, singleton_automaton(rsm, c), relaxation_cap, stats)

    def baseline(stats: Optional[EngineStats] = None):
        return wpds_post_star(wpds, singleton_pautomaton(wpds, corr, c), relaxation_cap, stats)

    return confdist, baseline


def bench_size(n: int, repetitions: int = BENCH_REPETITIONS, semiring: Optional[Semiring] = None,
               relaxation_cap: int = DEFAULT_RELAXATION_CAP) -> BenchRow:
    """
    Time both engines from ⟨e0, ε⟩ on dense_family(n).

    Timed runs are uncounted; one extra counted run per engine gives the
    semiring operation totals.
    """
    rsm = dense_family(n, semiring or boolean_semiring())
    confdist, baseline = _engines(rsm, relaxation_cap)
    confdist_seconds = median_seconds(confdist, repetitions)
    wpds_seconds = median_seconds(baseline, repetitions)
    confdist_stats, wpds_stats = EngineStats(), EngineStats()
    confdist(confdist_stats)
    baseline(wpds_stats)
    speedup = wpds_seconds / confdist_seconds if confdist_seconds > 0 else float("inf")
    return BenchRow(n, confdist_seconds, wpds_seconds, speedup, confdist_stats.operations, wpds_stats.operations)


def bench_dense(sizes: Sequence[int], repetitions: int = BENCH_REPETITIONS, show_progress: bool = True,
                relaxation_cap: int = DEFAULT_RELAXATION_CAP) -> List[BenchRow]:
    rows = []
    for n in tqdm(sizes, desc="dense family", unit="size", file=sys.stderr, disable=not show_progress):
        rows.append(bench_size(n, repetitions, relaxation_cap=relaxation_cap))
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BENCH_CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.formatted())
    return buffer.getvalue()


def write_csv(rows: Sequence[BenchRow], filepath: str) -> bool:
    return safe_write_text(filepath, rows_to_csv(rows))


def speedup_trend(rows: Sequence[BenchRow]) -> float:
    """speedup of the largest size divided by speedup of the smallest."""
    ordered = sorted(rows, key=lambda r: r.n)
    if len(ordered) < 2 or ordered[0].speedup == 0:
        return 1.0
    return ordered[-1].speedup / ordered[0].speedup
