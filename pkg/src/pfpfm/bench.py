"""(w, p) x pattern-length throughput sweep of accelerated vs baseline count."""

import csv
import logging
import time
import tracemalloc
from dataclasses import astuple, dataclass, fields

import numpy as np

from .corpus import sample_patterns
from .index import build_char_stage, build_index, count_many, pack_patterns
from .pfp import TriggerOracle

log = logging.getLogger(__name__)

CSV_HEADER = [
    "w",
    "p",
    "pattern_length",
    "num_queries",
    "accel_qps",
    "baseline_qps",
    "ratio",
    "build_seconds",
    "peak_build_bytes",
]

DEFAULT_W = (4, 6, 8, 10)
DEFAULT_P = (10, 30, 50, 100)
DEFAULT_LENGTHS = (125, 250, 500, 1000)


class BenchMismatch(RuntimeError):
    def __init__(self, w, p, pattern, accel, baseline):
        super().__init__(
            f"count mismatch at w={w} p={p}: accelerated {accel} != baseline {baseline} "
            f"for pattern {pattern.decode('latin-1')!r}"
        )
        self.w, self.p, self.pattern = w, p, pattern


@dataclass(frozen=True)
class BenchRecord:
    w: int
    p: int
    pattern_length: int
    num_queries: int
    accel_qps: float
    baseline_qps: float
    ratio: float
    build_seconds: float
    peak_build_bytes: int


def _measured(fn, *args, **kwargs):
    tracemalloc.start()
    t0 = time.perf_counter()
    try:
        out = fn(*args, **kwargs)
        elapsed = time.perf_counter() - t0
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return out, elapsed, peak


def _best_time(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def run_bench(text, w_list=DEFAULT_W, p_list=DEFAULT_P, lengths=DEFAULT_LENGTHS, num=1000, seed=0, repeats=3):
    """Sweep the grid and return one :class:`BenchRecord` per (w, p, length).

    The character-level stage (suffix array and character FM-index) does not
    depend on (w, p); it is built once and its cost is added to every
    cell's ``build_seconds``. Each batch is timed whole, best of ``repeats``.
    """
    char_stage, char_seconds, char_peak = _measured(build_char_stage, text)
    log.info("character stage built in %.2fs", char_seconds)
    batches = {
        length: sample_patterns(text, length, num, seed=[seed, length]) for length in lengths
    }
    packed = {length: pack_patterns(pats) for length, pats in batches.items()}

    records = []
    for w in w_list:
        for p in p_list:
            idx, cell_seconds, cell_peak = _measured(
                build_index, text, TriggerOracle.hashed(w, p), seed=seed, char_stage=char_stage
            )
            log.info("w=%d p=%d built in %.2fs: %s", w, p, cell_seconds, idx.summary())
            for length in lengths:
                pk = packed[length]
                # compile outside the timed region
                warm = (pk[0], pk[1][:2])
                count_many(idx, warm)
                count_many(idx, warm, baseline=True)
                accel, t_accel = _best_time(lambda: count_many(idx, pk), repeats)
                base, t_base = _best_time(lambda: count_many(idx, pk, baseline=True), repeats)
                bad = np.flatnonzero(accel != base)
                if bad.size:
                    i = int(bad[0])
                    raise BenchMismatch(w, p, batches[length][i], int(accel[i]), int(base[i]))
                n_q = len(batches[length])
                accel_qps = n_q / t_accel
                base_qps = n_q / t_base
                records.append(BenchRecord(
                    w, p, length, n_q, accel_qps, base_qps, round(accel_qps / base_qps, 3),
                    char_seconds + cell_seconds, max(char_peak, cell_peak),
                ))
                log.info("  length %d: accel %.0f q/s, baseline %.0f q/s, ratio %.3f",
                         length, accel_qps, base_qps, records[-1].ratio)
    return records


def write_csv(records, fh):
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])


def read_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    types = [f.type for f in fields(BenchRecord)]
    conv = [int if t in (int, "int") else float for t in types]
    return [BenchRecord(*(c(v) for c, v in zip(conv, row))) for row in reader]
