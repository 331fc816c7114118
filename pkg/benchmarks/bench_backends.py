"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``PFPFM_BACKEND``. Both runs build the same index and count
the same patterns; the counts must agree.

    python3 benchmarks/bench_backends.py --seed-len 20000 --copies 50
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from pfpfm import BACKEND, TriggerOracle, build_index, count_many
from pfpfm.corpus import repetitive_corpus, sample_patterns

cfg = json.loads(sys.argv[1])
text = repetitive_corpus(cfg["seed_len"], cfg["copies"], 0.01, seed=0)
pats = sample_patterns(text, cfg["length"], cfg["num"], seed=1)
oracle = TriggerOracle.hashed(cfg["w"], cfg["p"])

# first build and query compile the kernels under numba
t0 = time.perf_counter()
build_index(text[:5000], oracle)
count_many(build_index(text[:5000], oracle), pats[:2])
warmup = time.perf_counter() - t0

t0 = time.perf_counter()
idx = build_index(text, oracle)
build = time.perf_counter() - t0
t0 = time.perf_counter()
accel = count_many(idx, pats)
t_accel = time.perf_counter() - t0
t0 = time.perf_counter()
base = count_many(idx, pats, baseline=True)
t_base = time.perf_counter() - t0
assert (accel == base).all()
print(json.dumps({"backend": BACKEND, "n": len(text), "warmup_s": warmup, "build_s": build,
                  "accel_qps": len(pats) / t_accel, "baseline_qps": len(pats) / t_base,
                  "checksum": int(accel.sum())}))
"""


def run(backend, cfg):
    env = dict(os.environ, PFPFM_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(cfg)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed-len", type=int, default=20_000)
    ap.add_argument("--copies", type=int, default=50)
    ap.add_argument("--length", type=int, default=500)
    ap.add_argument("--num", type=int, default=200)
    ap.add_argument("-w", type=int, default=6)
    ap.add_argument("-p", type=int, default=50)
    args = ap.parse_args(argv)
    cfg = {"seed_len": args.seed_len, "copies": args.copies, "length": args.length,
           "num": args.num, "w": args.w, "p": args.p}

    rows = [run(b, cfg) for b in ("numba", "numpy")]
    if rows[0]["checksum"] != rows[1]["checksum"]:
        sys.exit("backends disagree on counts")
    print(f"text length {rows[0]['n']}, {args.num} patterns of length {args.length}, w={args.w} p={args.p}")
    print(f"{'backend':<8} {'warmup s':>9} {'build s':>9} {'accel q/s':>11} {'base q/s':>10}")
    for r in rows:
        print(f"{r['backend']:<8} {r['warmup_s']:>9.2f} {r['build_s']:>9.2f} "
              f"{r['accel_qps']:>11.1f} {r['baseline_qps']:>10.1f}")
    nb, np_ = rows
    print(f"numba speedup: build {np_['build_s'] / nb['build_s']:.1f}x, "
          f"accel count {nb['accel_qps'] / np_['accel_qps']:.1f}x, "
          f"baseline count {nb['baseline_qps'] / np_['baseline_qps']:.1f}x")


if __name__ == "__main__":
    main()
