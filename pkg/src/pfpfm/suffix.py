"""Suffix arrays, BWT and C-arrays over integer alphabets.

Inputs are integer sequences whose last symbol is a unique 0 (the
sentinel). Suffix sorting uses SA-IS under the numba backend; the numpy
backend falls back to vectorized prefix doubling.
"""

import numpy as np

from ._backend import USE_NUMBA, njit


class SentinelError(ValueError):
    """The input does not end with a unique minimal sentinel."""


@njit
def _induce(s, t, sa, starts, ends):
    n = s.shape[0]
    bkt = starts.copy()
    for i in range(n):
        p = sa[i]
        if p > 0 and not t[p - 1]:
            c = s[p - 1]
            sa[bkt[c]] = p - 1
            bkt[c] += 1
    bkt = ends.copy()
    for i in range(n - 1, -1, -1):
        p = sa[i]
        if p > 0 and t[p - 1]:
            c = s[p - 1]
            bkt[c] -= 1
            sa[bkt[c]] = p - 1


@njit
def _sais(s, k, sa):
    n = s.shape[0]
    if n == 1:
        sa[0] = 0
        return
    t = np.zeros(n, dtype=np.bool_)
    t[n - 1] = True
    for i in range(n - 2, -1, -1):
        if s[i] < s[i + 1] or (s[i] == s[i + 1] and t[i + 1]):
            t[i] = True

    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        counts[s[i]] += 1
    starts = np.zeros(k, dtype=np.int64)
    ends = np.zeros(k, dtype=np.int64)
    acc = 0
    for c in range(k):
        starts[c] = acc
        acc += counts[c]
        ends[c] = acc

    # 1. sort LMS substrings
    sa[:] = -1
    bkt = ends.copy()
    for i in range(1, n):
        if t[i] and not t[i - 1]:
            c = s[i]
            bkt[c] -= 1
            sa[bkt[c]] = i
    _induce(s, t, sa, starts, ends)

    n1 = 0
    for i in range(n):
        p = sa[i]
        if p > 0 and t[p] and not t[p - 1]:
            sa[n1] = p
            n1 += 1
    for i in range(n1, n):
        sa[i] = -1

    # 2. name LMS substrings; equal names need a recursive sort
    name = 0
    prev = -1
    for i in range(n1):
        pos = sa[i]
        diff = False
        d = 0
        while True:
            if prev == -1 or s[pos + d] != s[prev + d] or t[pos + d] != t[prev + d]:
                diff = True
                break
            if d > 0 and ((t[pos + d] and not t[pos + d - 1]) or (t[prev + d] and not t[prev + d - 1])):
                break
            d += 1
        if diff:
            name += 1
            prev = pos
        sa[n1 + (pos >> 1)] = name - 1
    j = n - 1
    for i in range(n - 1, n1 - 1, -1):
        if sa[i] >= 0:
            sa[j] = sa[i]
            j -= 1

    s1 = sa[n - n1:].copy()
    sa1 = np.empty(n1, dtype=sa.dtype)
    if name < n1:
        _sais(s1, name, sa1)
    else:
        for i in range(n1):
            sa1[s1[i]] = i

    # 3. induce the full order from the sorted LMS suffixes
    j = 0
    for i in range(1, n):
        if t[i] and not t[i - 1]:
            s1[j] = i
            j += 1
    for i in range(n1):
        sa1[i] = s1[sa1[i]]
    sa[:] = -1
    bkt = ends.copy()
    for i in range(n1 - 1, -1, -1):
        p = sa1[i]
        c = s[p]
        bkt[c] -= 1
        sa[bkt[c]] = p
    _induce(s, t, sa, starts, ends)


def sa_doubling(s):
    """Prefix-doubling suffix sort, O(n log^2 n), numpy only."""
    s = np.asarray(s)
    n = s.shape[0]
    rank = s.astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r, q = rank[sa], second[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate([[0], np.cumsum((r[1:] != r[:-1]) | (q[1:] != q[:-1]))])
        rank = new
        if n == 0 or rank[sa[-1]] == n - 1:
            return sa
        k *= 2


def sais(s, alphabet_size=None):
    """SA-IS suffix sort; the compiled kernel under numba, interpreted otherwise."""
    s = np.asarray(s)
    n = s.shape[0]
    dtype = np.int32 if n < 2**31 - 1 else np.int64
    k = int(s.max()) + 1 if alphabet_size is None else int(alphabet_size)
    sa = np.empty(n, dtype=dtype)
    _sais(s.astype(dtype), k, sa)
    return sa


def check_sentinel(s, alphabet_size=None):
    s = np.asarray(s)
    if s.ndim != 1 or s.shape[0] == 0:
        raise SentinelError("sequence must be one-dimensional and non-empty")
    if not np.issubdtype(s.dtype, np.integer):
        raise SentinelError("sequence must hold integer symbols")
    if s.min() < 0:
        raise SentinelError("symbols must be non-negative")
    if s[-1] != 0 or np.count_nonzero(s == 0) != 1:
        raise SentinelError("last symbol must be the only occurrence of 0")
    if alphabet_size is not None and s.max() >= alphabet_size:
        raise SentinelError(f"symbol {int(s.max())} outside alphabet of size {alphabet_size}")


def build_suffix_array(s, alphabet_size=None):
    """Suffix array of ``s``, which must end with its only 0."""
    s = np.asarray(s)
    check_sentinel(s, alphabet_size)
    if USE_NUMBA:
        return sais(s, alphabet_size)
    sa = sa_doubling(s)
    return sa.astype(np.int32 if s.shape[0] < 2**31 - 1 else np.int64)


def bwt_from_sa(s, sa):
    s = np.asarray(s)
    # sa - 1 == -1 wraps to the sentinel through negative indexing
    return s[np.asarray(sa) - 1]


def build_c_array(s, alphabet_size=None):
    s = np.asarray(s)
    sigma = int(s.max()) + 1 if alphabet_size is None else int(alphabet_size)
    c = np.zeros(sigma + 1, dtype=np.int64)
    np.cumsum(np.bincount(s, minlength=sigma), out=c[1:])
    return c


@njit
def _lf_walk(bwt, c_array, out):
    n = bwt.shape[0]
    seen = c_array[:-1].copy()
    lf = np.empty(n, dtype=np.int64)
    for i in range(n):
        c = bwt[i]
        lf[i] = seen[c]
        seen[c] += 1
    row = 0
    out[n - 1] = 0
    for i in range(n - 2, -1, -1):
        out[i] = bwt[row]
        row = lf[row]


def invert_bwt(bwt, c_array=None):
    """Rebuild the sentinel-terminated sequence from its BWT by LF steps."""
    bwt = np.asarray(bwt)
    if c_array is None:
        c_array = build_c_array(bwt)
    out = np.empty_like(bwt)
    _lf_walk(bwt, np.asarray(c_array, dtype=np.int64), out)
    return out
