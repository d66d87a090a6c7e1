"""
Benchmark harness on small dense instances.
"""
import pytest

from confdist.core.constants import BENCH_CSV_COLUMNS
from confdist.services.bench_service import (
    BenchRow, bench_dense, bench_size, median_seconds, rows_to_csv, speedup_trend, write_csv,
)


def test_bench_size_reports_both_engines():
    row = bench_size(2, repetitions=1)
    assert row.n == 2
    assert row.confdist_seconds > 0 and row.wpds_seconds > 0
    assert row.speedup == pytest.approx(row.wpds_seconds / row.confdist_seconds)
    assert row.confdist_ops > 0 and row.wpds_ops > 0


def test_bench_dense_keeps_size_order():
    rows = bench_dense([3, 1], repetitions=1, show_progress=False)
    assert [row.n for row in rows] == [3, 1]


def test_median_of_repetitions():
    calls = []
    assert median_seconds(lambda: calls.append(1), 3) >= 0
    assert len(calls) == 3


def test_csv_layout(tmp_path):
    rows = [BenchRow(1, 0.5, 1.0, 2.0, 10, 20), BenchRow(2, 0.25, 1.0, 4.0, 30, 90)]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0].split(",") == list(BENCH_CSV_COLUMNS)
    assert lines[1] == "1,0.500000,1.000000,2.000,10,20"
    path = tmp_path / "out.csv"
    assert write_csv(rows, str(path))
    assert path.read_text(encoding="utf-8") == text


def test_speedup_trend():
    rows = [BenchRow(40, 1, 8, 8.0, 0, 0), BenchRow(10, 1, 2, 2.0, 0, 0)]
    assert speedup_trend(rows) == 4.0
    assert speedup_trend(rows[:1]) == 1.0


# ============== Growth on the dense family ==============

def test_operation_ratio_grows_with_n():
    rows = bench_dense([5, 10, 20], repetitions=1, show_progress=False)
    ratios = [row.wpds_ops / row.confdist_ops for row in rows]
    assert ratios == sorted(ratios)
    assert ratios[0] > 1
    assert ratios[-1] >= 2 * ratios[0]


def test_baseline_grows_a_factor_of_n_faster():
    small, large = bench_dense([5, 20], repetitions=1, show_progress=False)
    confdist_growth = large.confdist_ops / small.confdist_ops
    wpds_growth = large.wpds_ops / small.wpds_ops
    assert wpds_growth >= 2 * confdist_growth


def test_wall_clock_speedup_widens():
    rows = bench_dense([5, 10, 20], repetitions=3, show_progress=False)
    assert all(row.speedup > 1 for row in rows if row.n >= 10)
    assert speedup_trend(rows) >= 2


@pytest.mark.slow
def test_full_dense_sweep():
    rows = bench_dense([10, 20, 40, 80], repetitions=1, show_progress=False)
    assert all(row.speedup > 1 for row in rows)
    assert speedup_trend(rows) >= 2
