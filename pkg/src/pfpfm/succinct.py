"""Rank/select bitvectors and balanced wavelet trees.

Both structures are immutable once built. A bitvector keeps its words
interleaved with the rank directory, one ``(ones_before_word, word)`` pair
per 64-bit word, so a rank query touches a single 16-byte row.

The wavelet tree is stored level-wise: level ``l`` is one bitvector over the
whole sequence, holding bit ``L-1-l`` of every symbol in the order obtained by
stably sorting on the top ``l`` bits. Node boundaries at every level come from
the cumulative symbol-count table ``less``, so no per-node pointers are kept.
"""

import numpy as np

from ._backend import USE_NUMBA, njit, popcount

SELECT_SAMPLE = 64


class NoSuchOccurrence(LookupError):
    """Raised by :meth:`BitVector.select` when fewer than ``k`` ones exist."""


# ---------------------------------------------------------------------------
# kernels


@njit
def rank1(blocks, i):
    k = i >> 6
    r = i & 63
    base = np.int64(blocks[k, 0])
    if r == 0:
        return base
    mask = (np.uint64(1) << np.uint64(r)) - np.uint64(1)
    return base + popcount(blocks[k, 1] & mask)


@njit
def get_bit(blocks, i):
    return np.int64((blocks[i >> 6, 1] >> np.uint64(i & 63)) & np.uint64(1))


@njit
def select1(blocks, samples, k):
    """Position of the k-th one (1-based); caller guarantees 1 <= k <= popcount."""
    j = (k - 1) // SELECT_SAMPLE
    lo = np.int64(samples[j])
    hi = np.int64(samples[j + 1])
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if np.int64(blocks[mid, 0]) < k:
            lo = mid
        else:
            hi = mid - 1
    x = blocks[lo, 1]
    for _ in range(k - np.int64(blocks[lo, 0]) - 1):
        x = x & (x - np.uint64(1))
    below = (x ^ (x - np.uint64(1))) >> np.uint64(1)
    return lo * 64 + popcount(below)


@njit
def wt_rank(levels, less, n_levels, sigma, c, i):
    if c < 0 or c >= sigma:
        return np.int64(0)
    pos = np.int64(i)
    for lvl in range(n_levels):
        shift = n_levels - lvl
        start = np.int64(less[(c >> shift) << shift])
        blk = levels[lvl]
        ones = rank1(blk, start + pos) - rank1(blk, start)
        if (c >> (shift - 1)) & 1:
            pos = ones
        else:
            pos -= ones
    return pos


@njit
def wt_rank_pair(levels, less, n_levels, sigma, c, i, j):
    """``(rank(c, i), rank(c, j))`` sharing the node-start rank per level."""
    if c < 0 or c >= sigma:
        return np.int64(0), np.int64(0)
    a = np.int64(i)
    b = np.int64(j)
    for lvl in range(n_levels):
        shift = n_levels - lvl
        start = np.int64(less[(c >> shift) << shift])
        blk = levels[lvl]
        r0 = rank1(blk, start)
        ones_a = rank1(blk, start + a) - r0
        ones_b = rank1(blk, start + b) - r0
        if (c >> (shift - 1)) & 1:
            a = ones_a
            b = ones_b
        else:
            a -= ones_a
            b -= ones_b
    return a, b


@njit
def wt_access(levels, less, n_levels, i):
    prefix = np.int64(0)
    pos = np.int64(i)
    for lvl in range(n_levels):
        shift = n_levels - lvl
        start = np.int64(less[prefix << shift])
        blk = levels[lvl]
        bit = get_bit(blk, start + pos)
        ones = rank1(blk, start + pos) - rank1(blk, start)
        if bit:
            pos = ones
        else:
            pos -= ones
        prefix = prefix * 2 + bit
    return prefix


@njit
def _stable_partition(cur, shift, n_keys):
    counts = np.zeros(n_keys + 1, dtype=np.int64)
    for x in cur:
        counts[(np.int64(x) >> shift) + 1] += 1
    for k in range(n_keys):
        counts[k + 1] += counts[k]
    out = np.empty_like(cur)
    for x in cur:
        key = np.int64(x) >> shift
        out[counts[key]] = x
        counts[key] += 1
    return out


# ---------------------------------------------------------------------------
# construction helpers


def _pack_words(bits):
    bits = np.asarray(bits)
    n = bits.shape[0]
    packed = np.packbits(bits.astype(bool, copy=False), bitorder="little")
    pad = (-packed.shape[0]) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return n, packed.view("<u8").astype(np.uint64, copy=False)


def _blocks_from_words(words):
    nw = words.shape[0]
    blocks = np.zeros((nw + 1, 2), dtype=np.uint64)
    counts = np.bitwise_count(words).astype(np.uint64)
    np.cumsum(counts, out=blocks[1:, 0])
    blocks[:nw, 1] = words
    return blocks


def _select_samples(blocks):
    nw = blocks.shape[0] - 1
    total = int(blocks[-1, 0])
    ks = np.arange(1, total + 1, SELECT_SAMPLE, dtype=np.uint64)
    # word holding the k-th one: first w with ones_through(w) >= k
    first = np.searchsorted(blocks[1:, 0], ks, side="left").astype(np.int64)
    return np.concatenate([first, np.array([max(nw - 1, 0)], dtype=np.int64)])


class BitVector:
    """Plain bitvector with constant-time rank and sampled select.

    ``rank(i)`` counts ones in ``[0, i)``; ``select(k)`` returns the position
    of the k-th one, 1-based, and raises :class:`NoSuchOccurrence` when there
    is none. ``select_or_n`` is the total variant returning ``len(self)``.
    """

    __slots__ = ("n_bits", "blocks", "samples")

    def __init__(self, bits=()):
        n, words = _pack_words(np.asarray(bits, dtype=bool))
        self._set(n, _blocks_from_words(words))

    def _set(self, n_bits, blocks):
        self.n_bits = int(n_bits)
        self.blocks = blocks
        self.samples = _select_samples(blocks)

    @classmethod
    def from_blocks(cls, n_bits, blocks):
        bv = cls.__new__(cls)
        bv._set(n_bits, np.ascontiguousarray(blocks, dtype=np.uint64))
        return bv

    def __len__(self):
        return self.n_bits

    @property
    def popcount(self):
        return int(self.blocks[-1, 0])

    def __getitem__(self, i):
        i = int(i)
        if not 0 <= i < self.n_bits:
            raise IndexError(f"bit index {i} out of range [0, {self.n_bits})")
        return int(get_bit(self.blocks, i))

    def rank(self, i):
        i = int(i)
        if not 0 <= i <= self.n_bits:
            raise IndexError(f"rank position {i} out of range [0, {self.n_bits}]")
        return int(rank1(self.blocks, i))

    def select(self, k):
        k = int(k)
        if not 1 <= k <= self.popcount:
            raise NoSuchOccurrence(f"no {k}-th one among {self.popcount}")
        return int(select1(self.blocks, self.samples, k))

    def select_or_n(self, k):
        try:
            return self.select(k)
        except NoSuchOccurrence:
            return self.n_bits

    def to_array(self):
        words = self.blocks[:-1, 1].astype("<u8").view(np.uint8)
        return np.unpackbits(words, bitorder="little")[: self.n_bits].astype(bool)

    def ones(self):
        return np.flatnonzero(self.to_array())

    def __repr__(self):
        return f"BitVector(n_bits={self.n_bits}, ones={self.popcount})"


def _levels_needed(sigma):
    return max(1, (int(sigma) - 1).bit_length())


class WaveletTree:
    """Balanced wavelet tree over integer symbols ``0 <= c < alphabet_size``."""

    __slots__ = ("alphabet_size", "length", "n_levels", "levels", "less")

    def __init__(self, seq, alphabet_size=None):
        seq = np.asarray(seq)
        if seq.ndim != 1:
            raise ValueError("wavelet tree input must be one-dimensional")
        if seq.size and seq.min() < 0:
            raise ValueError("wavelet tree symbols must be non-negative")
        top = int(seq.max()) + 1 if seq.size else 1
        sigma = top if alphabet_size is None else int(alphabet_size)
        if sigma < top:
            raise ValueError(f"symbol {top - 1} outside alphabet of size {sigma}")
        n_levels = _levels_needed(sigma)
        counts = np.bincount(seq, minlength=1 << n_levels) if seq.size else np.zeros(1 << n_levels, np.int64)
        less = np.zeros((1 << n_levels) + 1, dtype=np.int64)
        np.cumsum(counts, out=less[1:])

        cur = seq
        levels = []
        for lvl in range(n_levels):
            shift = n_levels - 1 - lvl
            n, words = _pack_words((cur >> shift) & 1)
            levels.append(_blocks_from_words(words))
            if lvl + 1 < n_levels:
                if USE_NUMBA:
                    cur = _stable_partition(cur, shift, 1 << (lvl + 1))
                else:
                    cur = cur[np.argsort(cur >> shift, kind="stable")]
        self._set(sigma, seq.shape[0], np.stack(levels), less)

    def _set(self, alphabet_size, length, levels, less):
        self.alphabet_size = int(alphabet_size)
        self.length = int(length)
        self.levels = levels
        self.n_levels = levels.shape[0]
        self.less = less

    @classmethod
    def from_arrays(cls, alphabet_size, length, levels, less):
        wt = cls.__new__(cls)
        wt._set(alphabet_size, length, np.ascontiguousarray(levels, dtype=np.uint64),
                np.ascontiguousarray(less, dtype=np.int64))
        return wt

    def __len__(self):
        return self.length

    def rank(self, c, i):
        i = int(i)
        if not 0 <= i <= self.length:
            raise IndexError(f"rank position {i} out of range [0, {self.length}]")
        return int(wt_rank(self.levels, self.less, self.n_levels, self.alphabet_size, int(c), i))

    def access(self, i):
        i = int(i)
        if not 0 <= i < self.length:
            raise IndexError(f"access position {i} out of range [0, {self.length})")
        return int(wt_access(self.levels, self.less, self.n_levels, i))

    def __getitem__(self, i):
        return self.access(i)

    def to_array(self):
        return np.array([self.access(i) for i in range(self.length)], dtype=np.int64)

    def __repr__(self):
        return f"WaveletTree(length={self.length}, alphabet_size={self.alphabet_size})"
