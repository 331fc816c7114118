"""Two-level FM-index: a character FM-index, a phrase FM-index and the
bitvector linking their rows.

``count`` backward-searches only the ragged ends of a query at character
level; the complete phrases in between are matched one phrase ID per step
in the FM-index of the parse.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._backend import njit
from .pfp import (
    NoTrigger,
    NotInDictionary,
    TriggerOracle,
    build_phrase_map,
    find_triggers,
    map_lookup,
    mulmod61,
    parse_query,
    parse_text,
    scan_triggers,
    with_sentinel,
    MERSENNE61,
    PhraseMap,
)
from .succinct import BitVector, WaveletTree, rank1, select1, wt_rank_pair
from .suffix import build_c_array, build_suffix_array, bwt_from_sa


class Interval(NamedTuple):
    """Inclusive BWT row range; ``lo > hi`` means empty."""

    lo: int
    hi: int

    @property
    def is_empty(self):
        return self.lo > self.hi

    @property
    def size(self):
        return max(self.hi - self.lo + 1, 0)


EMPTY = Interval(0, -1)


@dataclass(frozen=True)
class CharFmIndex:
    """FM-index of the sentinel-terminated text over a dense byte code."""

    wt: WaveletTree
    c_array: np.ndarray
    code_of: np.ndarray
    symbols: np.ndarray

    @property
    def text_len(self):
        return len(self.wt)

    def encode(self, pattern):
        """Byte pattern to codes; bytes absent from the text map to -1."""
        return self.code_of[np.frombuffer(bytes(pattern), dtype=np.uint8)].astype(np.int64)

    def kernel_args(self):
        wt = self.wt
        return (self.code_of, self.c_array, wt.levels, wt.less, wt.n_levels, wt.alphabet_size, wt.length)


@dataclass(frozen=True)
class ParseFmIndex:
    """FM-index of the parse, rotated so its unique 0 is the sentinel."""

    wt: WaveletTree
    c_array: np.ndarray

    @property
    def parse_len(self):
        return len(self.wt)

    def kernel_args(self):
        wt = self.wt
        return (self.c_array, wt.levels, wt.less, wt.n_levels, wt.alphabet_size, wt.length)


@dataclass(frozen=True)
class TwoLevelIndex:
    char_fm: CharFmIndex
    parse_fm: ParseFmIndex
    b: BitVector
    phrase_map: PhraseMap
    oracle: TriggerOracle
    n_phrases: int
    phrase_length_hist: np.ndarray = field(repr=False)

    @property
    def text_len(self):
        """Length of the indexed text, sentinel excluded."""
        return self.char_fm.text_len - 1

    @property
    def parse_len(self):
        return self.parse_fm.parse_len

    def summary(self):
        lengths = np.arange(self.phrase_length_hist.shape[0])
        total = int(self.phrase_length_hist.sum())
        mean = float((lengths * self.phrase_length_hist).sum() / total) if total else 0.0
        return {
            "n": self.text_len,
            "dictionary_size": self.n_phrases,
            "parse_len": self.parse_len,
            "mean_phrase_len": mean,
        }

    def kernel_args(self):
        return (
            self.oracle.kernel_args(),
            self.char_fm.kernel_args(),
            self.parse_fm.kernel_args(),
            (self.b.blocks, self.b.samples),
            self.phrase_map.kernel_args(),
        )


# ---------------------------------------------------------------------------
# kernels


@njit
def _char_search(q, a, b, lo, hi, char):
    code_of, c_array, levels, less, n_levels, sigma, _ = char
    for i in range(b - 1, a - 1, -1):
        c = np.int64(code_of[q[i]])
        if c < 0:
            return np.int64(0), np.int64(-1)
        r0, r1 = wt_rank_pair(levels, less, n_levels, sigma, c, lo, hi + 1)
        lo = c_array[c] + r0
        hi = c_array[c] + r1 - 1
        if lo > hi:
            return np.int64(0), np.int64(-1)
    return np.int64(lo), np.int64(hi)


@njit
def _code_search(codes, lo, hi, c_array, levels, less, n_levels, sigma):
    for i in range(codes.shape[0] - 1, -1, -1):
        c = np.int64(codes[i])
        if c < 0 or c >= sigma:
            return np.int64(0), np.int64(-1)
        r0, r1 = wt_rank_pair(levels, less, n_levels, sigma, c, lo, hi + 1)
        lo = c_array[c] + r0
        hi = c_array[c] + r1 - 1
        if lo > hi:
            return np.int64(0), np.int64(-1)
    return np.int64(lo), np.int64(hi)


@njit
def _phrase_fp(q, a, b, base):
    h = 0
    for k in range(a, b):
        h = mulmod61(h, base) + np.int64(q[k]) + 1
        if h >= MERSENNE61:
            h -= MERSENNE61
    return h


@njit
def count_kernel(q, oracle, char, parse, marks, pmap):
    mode, w, p, kr_base, top_pow, exp_hashes, exp_bytes = oracle
    n = char[6]
    m = q.shape[0]
    tpos = np.empty(max(m - w + 1, 0), dtype=np.int64)
    k = scan_triggers(q, 0, m, mode, w, p, kr_base, top_pow, exp_hashes, exp_bytes, tpos)
    if k == 0:
        lo, hi = _char_search(q, 0, m, 0, n - 1, char)
        return max(hi - lo + 1, 0)

    fbase, keys, vals, mask, data, offsets = pmap
    ids = np.empty(k - 1, dtype=np.int64)
    for j in range(k - 1):
        a = tpos[j]
        b = tpos[j + 1] + w
        pid = map_lookup(keys, vals, mask, data, offsets, _phrase_fp(q, a, b, fbase), q, a, b)
        if pid < 0:
            return 0
        ids[j] = pid

    lo, hi = _char_search(q, tpos[k - 1], m, 0, n - 1, char)
    if lo > hi:
        return 0
    if k > 1:
        blocks, samples = marks
        c_p, lv_p, less_p, nl_p, sigma_p, _ = parse
        plo = rank1(blocks, lo)
        phi = rank1(blocks, hi + 1) - 1
        plo, phi = _code_search(ids, plo, phi, c_p, lv_p, less_p, nl_p, sigma_p)
        if plo > phi:
            return 0
        lo = select1(blocks, samples, plo + 1)
        hi = select1(blocks, samples, phi + 1)
    if tpos[0] > 0:
        lo, hi = _char_search(q, 0, tpos[0], lo, hi, char)
    return max(hi - lo + 1, 0)


@njit
def baseline_kernel(q, char):
    lo, hi = _char_search(q, 0, q.shape[0], 0, char[6] - 1, char)
    return max(hi - lo + 1, 0)


@njit
def count_batch(buf, offsets, oracle, char, parse, marks, pmap):
    out = np.empty(offsets.shape[0] - 1, dtype=np.int64)
    for i in range(out.shape[0]):
        out[i] = count_kernel(buf[offsets[i] : offsets[i + 1]], oracle, char, parse, marks, pmap)
    return out


@njit
def baseline_batch(buf, offsets, char):
    out = np.empty(offsets.shape[0] - 1, dtype=np.int64)
    for i in range(out.shape[0]):
        out[i] = baseline_kernel(buf[offsets[i] : offsets[i + 1]], char)
    return out


# ---------------------------------------------------------------------------
# construction


@dataclass
class CharStage:
    """Character-level pieces independent of the parsing parameters."""

    text: bytes
    sa: np.ndarray
    char_fm: CharFmIndex


def build_char_stage(text):
    data = with_sentinel(text)
    arr = np.frombuffer(data, dtype=np.uint8)
    symbols = np.unique(arr)
    code_of = np.full(256, -1, dtype=np.int16)
    code_of[symbols] = np.arange(symbols.shape[0], dtype=np.int16)
    codes = code_of[arr].astype(np.uint8)
    sigma = symbols.shape[0]
    sa = build_suffix_array(codes, sigma)
    bwt = bwt_from_sa(codes, sa)
    fm = CharFmIndex(WaveletTree(bwt, sigma), build_c_array(codes, sigma), code_of, symbols)
    return CharStage(data, sa, fm)


def build_index(text, oracle, seed=0, char_stage=None):
    """Build the two-level index of ``text`` (sentinel appended internally).

    ``char_stage`` lets a parameter sweep reuse the suffix array and
    character FM-index across oracles.
    """
    if char_stage is None:
        char_stage = build_char_stage(text)
    data, sa = char_stage.text, char_stage.sa
    n = len(data)
    triggers = find_triggers(data, oracle, cyclic=True)
    dictionary, parse = parse_text(data, oracle, triggers)

    marked = np.zeros(n, dtype=bool)
    marked[triggers] = True
    b = BitVector(marked[sa])
    del marked

    # rotate the parse so its unique 0 (the sentinel phrase) comes last
    rotated = np.roll(parse.phrase_ids, -1)
    n_phrases = len(dictionary)
    sa_p = build_suffix_array(rotated, n_phrases)
    parse_fm = ParseFmIndex(WaveletTree(bwt_from_sa(rotated, sa_p), n_phrases),
                            build_c_array(rotated, n_phrases))
    return TwoLevelIndex(
        char_fm=char_stage.char_fm,
        parse_fm=parse_fm,
        b=b,
        phrase_map=build_phrase_map(dictionary, seed),
        oracle=oracle,
        n_phrases=n_phrases,
        phrase_length_hist=dictionary.length_histogram(),
    )


# ---------------------------------------------------------------------------
# queries


def _full(fm):
    return Interval(0, len(fm.wt) - 1)


def backward_search(fm, pattern, start=None):
    """Rows prefixed by ``pattern`` followed by whatever ``start`` selects.

    ``fm`` is a :class:`CharFmIndex` (``pattern`` is bytes) or a
    :class:`ParseFmIndex` (``pattern`` is a sequence of phrase IDs).
    """
    start = _full(fm) if start is None else Interval(*start)
    if start.is_empty:
        return EMPTY
    if isinstance(fm, CharFmIndex):
        codes = fm.encode(pattern)
        c_array, wt = fm.c_array, fm.wt
    else:
        codes = np.asarray(pattern, dtype=np.int64)
        c_array, wt = fm.c_array, fm.wt
    lo, hi = _code_search(codes, start.lo, start.hi, c_array, wt.levels, wt.less, wt.n_levels, wt.alphabet_size)
    return EMPTY if lo > hi else Interval(int(lo), int(hi))


def map_char_to_parse(idx, iv):
    """Character rows (all starting with a trigger) to parse rows."""
    iv = Interval(*iv)
    if iv.is_empty:
        return EMPTY
    lo = idx.b.rank(iv.lo)
    hi = idx.b.rank(iv.hi + 1) - 1
    assert hi - lo == iv.hi - iv.lo, "interval contains rows not starting with a trigger"
    return Interval(lo, hi)


def map_parse_to_char(idx, iv):
    iv = Interval(*iv)
    if iv.is_empty:
        return EMPTY
    return Interval(idx.b.select(iv.lo + 1), idx.b.select(iv.hi + 1))


def _as_query(q):
    if isinstance(q, str):
        q = q.encode("ascii")
    q = bytes(q)
    if not q:
        raise ValueError("query must be non-empty")
    return q


def count(idx, q, trace=None):
    """Number of occurrences of ``q`` in the indexed text.

    Pass a list as ``trace`` to collect ``(step, Interval)`` pairs for the
    intermediate search states; otherwise the compiled kernel answers.
    """
    q = _as_query(q)
    if trace is None:
        arr = np.frombuffer(q, dtype=np.uint8)
        return int(count_kernel(arr, *idx.kernel_args()))

    enc = parse_query(q, idx.oracle, idx.phrase_map)
    if isinstance(enc, NotInDictionary):
        trace.append(("not_in_dictionary", EMPTY))
        return 0
    if isinstance(enc, NoTrigger):
        iv = backward_search(idx.char_fm, q)
        trace.append(("no_trigger", iv))
        return iv.size

    iv = backward_search(idx.char_fm, enc.beta)
    trace.append(("beta", iv))
    if iv.is_empty:
        return 0
    if enc.mid_phrase_ids:
        iv = map_char_to_parse(idx, iv)
        trace.append(("to_parse", iv))
        iv = backward_search(idx.parse_fm, enc.mid_phrase_ids, iv)
        trace.append(("phrases", iv))
        if iv.is_empty:
            return 0
        iv = map_parse_to_char(idx, iv)
        trace.append(("to_char", iv))
    if enc.alpha:
        iv = backward_search(idx.char_fm, enc.alpha[: -enc.w], iv)
        trace.append(("alpha", iv))
    return iv.size


def count_baseline(idx, q):
    """Plain character-level backward search over the whole query."""
    q = _as_query(q)
    return int(baseline_kernel(np.frombuffer(q, dtype=np.uint8), idx.char_fm.kernel_args()))


def pack_patterns(patterns):
    """Concatenate byte patterns into one buffer plus offsets."""
    patterns = [_as_query(q) for q in patterns]
    offsets = np.zeros(len(patterns) + 1, dtype=np.int64)
    np.cumsum([len(q) for q in patterns], out=offsets[1:])
    buf = np.frombuffer(b"".join(patterns), dtype=np.uint8)
    return buf, offsets


def count_many(idx, patterns, baseline=False):
    """Counts for a batch of patterns in one kernel call."""
    buf, offsets = patterns if isinstance(patterns, tuple) else pack_patterns(patterns)
    if baseline:
        return baseline_batch(buf, offsets, idx.char_fm.kernel_args())
    return count_batch(buf, offsets, *idx.kernel_args())
