"""Prefix-free parsing of texts and query patterns.

Trigger windows are length-``w`` byte strings selected either by a
Karp-Rabin fingerprint (``hash mod p == 0``) or by an explicit set. In a
sentinel-terminated text the window that starts at the sentinel is always a
trigger and every other window touching the sentinel never is. Phrases run
from one trigger window to the end of the next one, so neighbours overlap by
``w`` bytes.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import USE_NUMBA, njit

MERSENNE61 = (1 << 61) - 1
DEFAULT_KR_BASE = 0x1F6E5F3A9C1D7B35 % MERSENNE61 | 1
MAX_PHRASES = 1 << 32
MAX_RESEEDS = 64

MODE_HASH = 0
MODE_EXPLICIT = 1

_MASK30 = (1 << 30) - 1
_MASK31 = (1 << 31) - 1


class PhraseOverflowError(ValueError):
    """The dictionary has more phrases than 32-bit phrase IDs can address."""


# ---------------------------------------------------------------------------
# Karp-Rabin arithmetic modulo 2^61 - 1; every intermediate stays below 2^63


@njit
def mulmod61(a, b):
    au = a >> 31
    ad = a & _MASK31
    bu = b >> 31
    bd = b & _MASK31
    mid = ad * bu + au * bd
    x = au * bu * 2 + (mid >> 30) + ((mid & _MASK30) << 31) + ad * bd
    x = (x >> 61) + (x & MERSENNE61)
    if x >= MERSENNE61:
        x -= MERSENNE61
    return x


def mulmod61_array(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.int64(b)
    au, ad = a >> 31, a & _MASK31
    bu, bd = b >> 31, b & _MASK31
    mid = ad * bu + au * bd
    x = au * bu * 2 + (mid >> 30) + ((mid & _MASK30) << 31) + ad * bd
    x = (x >> 61) + (x & MERSENNE61)
    return np.where(x >= MERSENNE61, x - MERSENNE61, x)


def powmod61(base, e):
    return pow(int(base), int(e), MERSENNE61)


def kr_hash(data, base, offset=0):
    """Reference polynomial hash of ``data`` with symbols ``byte + offset``."""
    h = 0
    for b in bytes(data):
        h = (h * base + b + offset) % MERSENNE61
    return h


@njit
def _is_explicit_trigger(arr, i, w, h, exp_hashes, exp_bytes):
    lo = 0
    hi = exp_hashes.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if exp_hashes[mid] < h:
            lo = mid + 1
        else:
            hi = mid
    while lo < exp_hashes.shape[0] and exp_hashes[lo] == h:
        same = True
        for j in range(w):
            if arr[i + j] != exp_bytes[lo, j]:
                same = False
                break
        if same:
            return True
        lo += 1
    return False


@njit
def scan_triggers(arr, start, stop, mode, w, p, base, top_pow, exp_hashes, exp_bytes, out):
    """Write start positions of trigger windows inside ``arr[start:stop]`` to ``out``."""
    count = 0
    if stop - start < w:
        return count
    h = 0
    for j in range(start, start + w):
        h = mulmod61(h, base) + np.int64(arr[j])
        if h >= MERSENNE61:
            h -= MERSENNE61
    i = start
    while True:
        if mode == MODE_HASH:
            hit = h % p == 0
        else:
            hit = _is_explicit_trigger(arr, i, w, h, exp_hashes, exp_bytes)
        if hit:
            out[count] = i
            count += 1
        if i + w >= stop:
            break
        h -= mulmod61(np.int64(arr[i]), top_pow)
        if h < 0:
            h += MERSENNE61
        h = mulmod61(h, base) + np.int64(arr[i + w])
        if h >= MERSENNE61:
            h -= MERSENNE61
        i += 1
    return count


def window_hashes(arr, w, base):
    """Hash of every full length-``w`` window, vectorized over positions."""
    arr = np.asarray(arr)
    m = arr.shape[0] - w + 1
    if m <= 0:
        return np.zeros(0, dtype=np.int64)
    h = np.zeros(m, dtype=np.int64)
    for j in range(w):
        h = mulmod61_array(h, base) + arr[j : j + m]
        h = np.where(h >= MERSENNE61, h - MERSENNE61, h)
    return h


@njit
def prefix_fingerprints(arr, start, stop, base, out):
    """``out[k]`` = fingerprint of ``arr[start:start+k]`` (symbols shifted by one)."""
    h = 0
    out[0] = 0
    for k in range(stop - start):
        h = mulmod61(h, base) + np.int64(arr[start + k]) + 1
        if h >= MERSENNE61:
            h -= MERSENNE61
        out[k + 1] = h


@njit
def _phrase_fingerprints(data, offsets, base):
    n = offsets.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        h = 0
        for j in range(offsets[i], offsets[i + 1]):
            h = mulmod61(h, base) + np.int64(data[j]) + 1
            if h >= MERSENNE61:
                h -= MERSENNE61
        out[i] = h
    return out


# ---------------------------------------------------------------------------
# trigger oracle


def _as_bytes(x):
    if isinstance(x, str):
        return x.encode("ascii")
    return bytes(x)


@dataclass(frozen=True)
class TriggerOracle:
    """Decides which length-``w`` windows are trigger strings.

    Use :meth:`hashed` for the Karp-Rabin rule and :meth:`explicit_set` to
    fix the trigger set directly.
    """

    w: int
    p: int = 1
    kr_base: int = DEFAULT_KR_BASE
    kr_prime: int = MERSENNE61
    explicit: tuple = None
    _exp: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.w < 1:
            raise ValueError("window length w must be at least 1")
        if self.p < 1:
            raise ValueError("modulus p must be at least 1")
        if self.kr_prime != MERSENNE61:
            raise ValueError("only the Mersenne prime 2^61-1 is supported")
        if not 1 <= self.kr_base < MERSENNE61:
            raise ValueError("kr_base must lie in [1, 2^61-1)")
        if self.explicit is not None:
            strings = tuple(sorted({_as_bytes(s) for s in self.explicit}))
            for s in strings:
                if len(s) != self.w:
                    raise ValueError(f"trigger {s!r} does not have length {self.w}")
                if 0 in s:
                    raise ValueError("trigger strings may not contain the sentinel byte")
            object.__setattr__(self, "explicit", strings)
        object.__setattr__(self, "_exp", self._explicit_arrays())

    @classmethod
    def hashed(cls, w, p, kr_base=DEFAULT_KR_BASE):
        return cls(w=int(w), p=int(p), kr_base=int(kr_base))

    @classmethod
    def explicit_set(cls, strings, w=None):
        strings = [_as_bytes(s) for s in strings]
        if w is None:
            if not strings:
                raise ValueError("window length needed for an empty trigger set")
            w = len(strings[0])
        return cls(w=int(w), explicit=tuple(strings))

    @classmethod
    def from_file(cls, path, w=None):
        """Explicit trigger set read from a file with one string per line."""
        lines = Path(path).read_text(encoding="ascii").splitlines()
        return cls.explicit_set([ln.strip() for ln in lines if ln.strip()], w=w)

    @property
    def mode(self):
        return MODE_HASH if self.explicit is None else MODE_EXPLICIT

    @property
    def top_pow(self):
        return powmod61(self.kr_base, self.w - 1)

    def _explicit_arrays(self):
        strings = self.explicit or ()
        mat = np.zeros((len(strings), self.w), dtype=np.uint8)
        hashes = np.zeros(len(strings), dtype=np.int64)
        for i, s in enumerate(strings):
            mat[i] = np.frombuffer(s, dtype=np.uint8)
            hashes[i] = kr_hash(s, self.kr_base)
        order = np.argsort(hashes, kind="stable")
        return hashes[order], np.ascontiguousarray(mat[order])

    def kernel_args(self):
        exp_hashes, exp_bytes = self._exp
        return (self.mode, self.w, self.p, self.kr_base, self.top_pow, exp_hashes, exp_bytes)

    def is_trigger(self, window):
        window = _as_bytes(window)
        if len(window) != self.w or 0 in window:
            return False
        if self.explicit is not None:
            return window in self.explicit
        return kr_hash(window, self.kr_base) % self.p == 0


def _scan_numpy(arr, oracle):
    h = window_hashes(arr, oracle.w, oracle.kr_base)
    if oracle.explicit is None:
        return np.flatnonzero(h % oracle.p == 0)
    exp_hashes, exp_bytes = oracle._exp
    cand = np.flatnonzero(np.isin(h, exp_hashes))
    if cand.size == 0:
        return cand
    windows = np.lib.stride_tricks.sliding_window_view(arr, oracle.w)[cand]
    hit = (windows[:, None, :] == exp_bytes[None, :, :]).all(axis=2).any(axis=1)
    return cand[hit]


def _scan(arr, oracle):
    if not USE_NUMBA:
        return _scan_numpy(arr, oracle).astype(np.int64)
    out = np.empty(max(arr.shape[0] - oracle.w + 1, 0), dtype=np.int64)
    k = scan_triggers(arr, 0, arr.shape[0], *oracle.kernel_args(), out)
    return out[:k]


def _as_array(text):
    if isinstance(text, np.ndarray):
        return np.ascontiguousarray(text, dtype=np.uint8)
    return np.frombuffer(_as_bytes(text), dtype=np.uint8)


def find_triggers(text, oracle, cyclic=False):
    """Sorted start positions of trigger windows in ``text``.

    With ``cyclic=True`` the text must end with its only 0 byte (the
    sentinel); the sentinel position is then always reported and windows
    wrapping through it never are. Otherwise only windows lying fully
    inside ``text`` are considered.
    """
    arr = _as_array(text)
    if not cyclic:
        return _scan(arr, oracle)
    n = arr.shape[0]
    if n == 0 or arr[-1] != 0 or np.count_nonzero(arr == 0) != 1:
        raise ValueError("cyclic text must end with its only sentinel byte")
    body = _scan(arr[:-1], oracle)
    return np.concatenate([body, np.array([n - 1], dtype=np.int64)])


# ---------------------------------------------------------------------------
# dictionary and parse


@dataclass(frozen=True)
class Dictionary:
    """Lexicographically sorted, prefix-free list of distinct phrases."""

    phrases: tuple

    def __len__(self):
        return len(self.phrases)

    def __getitem__(self, i):
        return self.phrases[i]

    def __iter__(self):
        return iter(self.phrases)

    def packed(self):
        """Phrases concatenated into one byte array plus offsets."""
        lengths = np.fromiter((len(ph) for ph in self.phrases), dtype=np.int64, count=len(self.phrases))
        offsets = np.zeros(len(self.phrases) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        data = np.frombuffer(b"".join(self.phrases), dtype=np.uint8)
        return data, offsets

    def is_prefix_free(self):
        # in sorted order a phrase that prefixes another prefixes its successor
        return all(not b.startswith(a) for a, b in zip(self.phrases, self.phrases[1:]))

    def length_histogram(self):
        lengths = np.fromiter((len(ph) for ph in self.phrases), dtype=np.int64, count=len(self.phrases))
        return np.bincount(lengths) if lengths.size else np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class ParseResult:
    """Phrase IDs in text order, starting with the phrase at the sentinel.

    ``trigger_positions`` is sorted, so ``phrase_ids[0]`` belongs to the last
    trigger position (the sentinel, ``n - 1``) and ``phrase_ids[i]`` for
    ``i >= 1`` to ``trigger_positions[i - 1]``.
    """

    phrase_ids: np.ndarray
    trigger_positions: np.ndarray

    def __len__(self):
        return int(self.phrase_ids.shape[0])


def with_sentinel(text):
    """Validate ``text`` and return it as bytes with a trailing 0 byte."""
    data = _as_bytes(text)
    if not data:
        raise ValueError("cannot index an empty text")
    if 0 in data:
        raise ValueError("text contains the reserved sentinel byte 0x00")
    return data + b"\x00"


def parse_text(text, oracle, triggers=None):
    """Prefix-free parse of a sentinel-terminated text.

    Returns ``(Dictionary, ParseResult)``. ``triggers`` may carry the result
    of ``find_triggers(text, oracle, cyclic=True)`` when already computed.
    """
    data = _as_bytes(text)
    n = len(data)
    if triggers is None:
        triggers = find_triggers(data, oracle, cyclic=True)
    w = oracle.w
    # rotate so the sentinel comes first; trigger t moves to t + 1
    rot = data[-1:] + data[:-1]
    reps = -(-(n + w) // n)
    ext = (rot * reps)[: n + w]
    starts = np.concatenate([[0], triggers[:-1] + 1]).tolist()
    ends = starts[1:] + [n]
    phrases = [ext[s : e + w] for s, e in zip(starts, ends)]
    dictionary = sorted(set(phrases))
    if len(dictionary) >= MAX_PHRASES:
        raise PhraseOverflowError(f"{len(dictionary)} distinct phrases exceed 32-bit phrase IDs")
    rank = {ph: i for i, ph in enumerate(dictionary)}
    ids = np.fromiter((rank[ph] for ph in phrases), dtype=np.uint32, count=len(phrases))
    return Dictionary(tuple(dictionary)), ParseResult(ids, np.asarray(triggers, dtype=np.int64))


# ---------------------------------------------------------------------------
# phrase map


def fingerprint_base(seed):
    rng = np.random.default_rng(seed)
    return int(rng.integers(1 << 32, MERSENNE61 - 1)) | 1


@njit
def _fill_table(fps, keys, vals, mask):
    for i in range(fps.shape[0]):
        slot = fps[i] & mask
        while keys[slot] != -1:
            slot = (slot + 1) & mask
        keys[slot] = fps[i]
        vals[slot] = i


@njit
def map_lookup(keys, vals, mask, data, offsets, fp, q, a, b):
    """Phrase ID of ``q[a:b]`` whose fingerprint is ``fp``, or -1."""
    slot = fp & mask
    while True:
        key = keys[slot]
        if key == -1:
            return -1
        if key == fp:
            pid = vals[slot]
            lo = offsets[pid]
            if offsets[pid + 1] - lo != b - a:
                return -1
            for k in range(b - a):
                if data[lo + k] != q[a + k]:
                    return -1
            return pid
        slot = (slot + 1) & mask


@dataclass(frozen=True)
class PhraseMap:
    """Fingerprint-keyed map from phrase bytes to dictionary rank.

    Every hit is verified against the stored phrase bytes, so lookups are
    exact. Fingerprints of distinct phrases are unique by construction; the
    builder reseeds until they are.
    """

    seed: int
    base: int
    keys: np.ndarray
    vals: np.ndarray
    data: np.ndarray
    offsets: np.ndarray

    @property
    def mask(self):
        return self.keys.shape[0] - 1

    def __len__(self):
        return int(self.offsets.shape[0] - 1)

    def fingerprint(self, phrase):
        return kr_hash(phrase, self.base, offset=1)

    def lookup(self, phrase):
        """Rank of ``phrase`` in the dictionary, or None when absent."""
        phrase = _as_bytes(phrase)
        q = np.frombuffer(phrase, dtype=np.uint8)
        pid = map_lookup(self.keys, self.vals, self.mask, self.data, self.offsets,
                         self.fingerprint(phrase), q, 0, len(phrase))
        return None if pid < 0 else int(pid)

    def phrase(self, pid):
        return self.data[self.offsets[pid] : self.offsets[pid + 1]].tobytes()

    def kernel_args(self):
        return (self.base, self.keys, self.vals, self.mask, self.data, self.offsets)


def build_phrase_map(dictionary, seed=0):
    data, offsets = dictionary.packed()
    n = len(dictionary)
    cap = 1
    while cap < 2 * max(n, 1):
        cap <<= 1
    for attempt in range(MAX_RESEEDS):
        base = fingerprint_base(seed + attempt)
        fps = _phrase_fingerprints(data, offsets, base)
        if np.unique(fps).shape[0] != n:
            continue
        keys = np.full(cap, -1, dtype=np.int64)
        vals = np.zeros(cap, dtype=np.int64)
        _fill_table(fps, keys, vals, cap - 1)
        return PhraseMap(seed + attempt, base, keys, vals, data, offsets)
    raise RuntimeError(f"phrase fingerprints kept colliding after {MAX_RESEEDS} reseeds")


# ---------------------------------------------------------------------------
# query parsing


@dataclass(frozen=True)
class NoTrigger:
    query: bytes


@dataclass(frozen=True)
class NotInDictionary:
    phrase: bytes


@dataclass(frozen=True)
class PartialEncoding:
    """Query split into ``alpha``, complete phrase IDs and ``beta``.

    ``alpha`` runs to the end of the first trigger window (empty when the
    query starts with one), ``beta`` from the start of the last trigger
    window. Neighbouring pieces overlap by ``w`` bytes.
    """

    alpha: bytes
    mid_phrase_ids: tuple
    beta: bytes
    w: int

    def reconstruct(self, dictionary):
        pieces = ([self.alpha] if self.alpha else []) + [dictionary[i] for i in self.mid_phrase_ids] + [self.beta]
        out = pieces[0]
        for piece in pieces[1:]:
            out += piece[self.w :]
        return out


def parse_query(q, oracle, phrase_map):
    q = _as_bytes(q)
    if not q:
        raise ValueError("query must be non-empty")
    t = find_triggers(q, oracle).tolist()
    if not t:
        return NoTrigger(q)
    w = oracle.w
    mids = []
    for a, b in zip(t, t[1:]):
        phrase = q[a : b + w]
        pid = phrase_map.lookup(phrase)
        if pid is None:
            return NotInDictionary(phrase)
        mids.append(pid)
    alpha = q[: t[0] + w] if t[0] > 0 else b""
    return PartialEncoding(alpha, tuple(mids), q[t[-1] :], w)
