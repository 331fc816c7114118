import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfpfm import BitVector, NoSuchOccurrence, WaveletTree

FIG2_MARKS = {0, 1, 2, 19, 31, 32}


@pytest.fixture(scope="module")
def fig2_b():
    return BitVector([i in FIG2_MARKS for i in range(41)])


@pytest.mark.parametrize("i, expected", [(31, 4), (32, 5), (0, 0), (41, 6)])
def test_rank_on_marking_bitvector(fig2_b, i, expected):
    assert fig2_b.rank(i) == expected


@pytest.mark.parametrize("k, expected", [(3, 2), (1, 0), (4, 19), (6, 32)])
def test_select_on_marking_bitvector(fig2_b, k, expected):
    assert fig2_b.select(k) == expected


def test_select_small():
    assert BitVector([0, 1, 1, 0]).select(2) == 2


def test_select_out_of_range_raises_and_total_variant(fig2_b):
    with pytest.raises(NoSuchOccurrence):
        fig2_b.select(7)
    with pytest.raises(NoSuchOccurrence):
        fig2_b.select(0)
    assert fig2_b.select_or_n(7) == 41


def test_rank_bounds_are_checked(fig2_b):
    with pytest.raises(IndexError):
        fig2_b.rank(42)
    with pytest.raises(IndexError):
        fig2_b.rank(-1)
    with pytest.raises(IndexError):
        fig2_b[41]


def test_empty_bitvector():
    bv = BitVector([])
    assert len(bv) == 0 and bv.rank(0) == 0 and bv.popcount == 0


@pytest.mark.parametrize("n", [1, 63, 64, 65, 127, 128, 1000, 4096])
def test_word_boundaries(n, rng):
    bits = rng.random(n) < 0.5
    bv = BitVector(bits)
    prefix = np.concatenate([[0], np.cumsum(bits)])
    assert [bv.rank(i) for i in range(n + 1)] == prefix.tolist()
    assert (bv.to_array() == bits).all()
    ones = np.flatnonzero(bits)
    assert [bv.select(k) for k in range(1, len(ones) + 1)] == ones.tolist()


@pytest.mark.parametrize("density", [0.001, 0.02, 0.5, 0.99])
def test_rank_select_random_against_scan(density, rng):
    n = 200_000
    bits = rng.random(n) < density
    bv = BitVector(bits)
    prefix = np.concatenate([[0], np.cumsum(bits)])
    ones = np.flatnonzero(bits)
    for i in rng.integers(0, n + 1, 2000):
        assert bv.rank(i) == prefix[i]
    if ones.size:
        for k in rng.integers(1, ones.size + 1, 2000):
            assert bv.select(k) == ones[k - 1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.booleans(), max_size=700))
def test_rank_select_inverse(bits):
    bv = BitVector(bits)
    assert bv.rank(0) == 0
    assert bv.rank(len(bits)) == sum(bits)
    for i in range(len(bits)):
        assert bv.rank(i + 1) - bv.rank(i) in (0, 1)
    for k in range(1, bv.popcount + 1):
        p = bv.select(k)
        assert bv[p] == 1 and bv.rank(p) == k - 1


BWT_P = [5, 3, 0, 4, 2, 1]


def test_wavelet_rank_and_access_on_parse_bwt():
    wt = WaveletTree(BWT_P)
    assert wt.rank(3, 2) == 1
    assert wt.access(0) == 5
    assert wt.to_array().tolist() == BWT_P
    assert all(wt.rank(c, 0) == 0 for c in range(6))


def test_wavelet_trivial_cases():
    assert WaveletTree(np.frombuffer(b"AAAA", np.uint8)).rank(ord("A"), 4) == 4
    assert WaveletTree([0]).access(0) == 0


def test_wavelet_symbol_outside_alphabet_counts_zero():
    wt = WaveletTree([0, 1, 2, 1], alphabet_size=3)
    assert wt.rank(3, 4) == 0
    assert wt.rank(1000, 4) == 0


def test_wavelet_rejects_out_of_range_positions():
    wt = WaveletTree([1, 0])
    with pytest.raises(IndexError):
        wt.access(2)
    with pytest.raises(IndexError):
        wt.rank(0, 3)


@pytest.mark.parametrize("sigma", [1, 2, 3, 4, 5, 256, 100_000])
def test_wavelet_random_against_scan(sigma, rng):
    n = 20_000
    seq = rng.integers(0, sigma, n)
    wt = WaveletTree(seq, sigma)
    for _ in range(1000):
        i = int(rng.integers(0, n + 1))
        c = int(seq[rng.integers(0, n)]) if rng.random() < 0.8 else int(rng.integers(0, sigma))
        assert wt.rank(c, i) == np.count_nonzero(seq[:i] == c)
        if i < n:
            assert wt.access(i) == seq[i]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=300))
def test_wavelet_ranks_sum_to_length(seq):
    wt = WaveletTree(seq)
    assert sum(wt.rank(c, len(seq)) for c in range(wt.alphabet_size)) == len(seq)
    assert wt.to_array().tolist() == seq
