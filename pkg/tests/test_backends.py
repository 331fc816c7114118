import os
import subprocess
import sys

import pytest

SCRIPT = r"""
import numpy as np
from pfpfm import TriggerOracle, build_index, count_many, BACKEND
from pfpfm.corpus import repetitive_corpus, sample_patterns
assert BACKEND == "{backend}", BACKEND
text = repetitive_corpus(3000, 15, 0.02, seed=5)
idx = build_index(text, TriggerOracle.hashed(4, 10))
pats = sample_patterns(text, 60, 200, seed=1) + [b"ACGTTTTTGCA" * 4]
a = count_many(idx, pats)
b = count_many(idx, pats, baseline=True)
assert (a == b).all()
print(",".join(map(str, a.tolist())), idx.parse_len, idx.n_phrases)
"""


def run(backend):
    env = dict(os.environ, PFPFM_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", SCRIPT.format(backend=backend)],
                          env=env, capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.mark.slow
def test_numpy_fallback_matches_numba():
    assert run("numpy") == run("numba")


def test_unknown_backend_rejected():
    env = dict(os.environ, PFPFM_BACKEND="fortran")
    proc = subprocess.run([sys.executable, "-c", "import pfpfm"], env=env, capture_output=True, text=True)
    assert proc.returncode != 0
