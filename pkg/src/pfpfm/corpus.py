"""Text ingestion, synthetic repetitive corpora and query sampling."""

from pathlib import Path

import numpy as np

DNA = np.frombuffer(b"ACGT", dtype=np.uint8)


def parse_fasta(raw):
    """Concatenate all FASTA records: headers dropped, newlines removed, uppercased."""
    chunks = []
    for line in raw.splitlines():
        if line.startswith(b">") or line.startswith(b";"):
            continue
        chunks.append(line.strip())
    return b"".join(chunks).upper()


def read_text(path):
    """Load an input file: FASTA when the first non-blank byte is '>', raw otherwise.

    Raw text keeps every byte except trailing line terminators.
    """
    raw = Path(path).read_bytes()
    if raw.lstrip()[:1] == b">":
        return parse_fasta(raw)
    return raw.rstrip(b"\r\n")


def random_dna(length, rng):
    return DNA[rng.integers(0, 4, length)].tobytes()


def mutate(seq, rate, rng):
    """Copy of ``seq`` with ``round(rate * len)`` distinct point substitutions."""
    arr = np.frombuffer(seq, dtype=np.uint8).copy()
    k = int(round(rate * arr.shape[0]))
    if k:
        pos = rng.choice(arr.shape[0], size=k, replace=False)
        code = np.searchsorted(DNA, arr[pos])
        arr[pos] = DNA[(code + rng.integers(1, 4, k)) % 4]
    return arr.tobytes()


def repetitive_corpus(seed_len=50_000, copies=1000, mutation_rate=0.01, seed=0):
    """``copies`` independently mutated copies of one random DNA seed string."""
    rng = np.random.default_rng(seed)
    base = random_dna(seed_len, rng)
    return b"".join(mutate(base, mutation_rate, rng) for _ in range(copies))


def sample_patterns(text, length, num, seed=0):
    """``num`` substrings of ``text`` with uniformly random start positions."""
    n = len(text)
    if length < 1 or length > n:
        raise ValueError(f"pattern length {length} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, n - length + 1, num)
    return [text[s : s + length] for s in starts.tolist()]
