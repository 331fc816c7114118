"""On-disk index container.

Layout (little-endian throughout)::

    magic    8 bytes  b"PFPFM1\\0\\0"
    version  u32
    sections header, char_fm, parse_fm, b, phrase_map, stats
             each a u64 byte length followed by its payload
    crc32    u32 over every preceding byte

Arrays inside a section carry their dtype string, shape and raw data; data
starts on an 8-byte boundary of the file so loaded arrays stay aligned.
"""

import struct
import zlib
from pathlib import Path

import numpy as np

from .index import CharFmIndex, ParseFmIndex, TwoLevelIndex
from .pfp import PhraseMap, TriggerOracle
from .succinct import BitVector, WaveletTree

MAGIC = b"PFPFM1\x00\x00"
VERSION = 1


class ContainerError(ValueError):
    pass


class _Writer:
    def __init__(self):
        self.buf = bytearray()

    def u8(self, x):
        self.buf += struct.pack("<B", x)

    def u32(self, x):
        self.buf += struct.pack("<I", x)

    def u64(self, x):
        self.buf += struct.pack("<Q", x)

    def i64(self, x):
        self.buf += struct.pack("<q", x)

    def blob(self, b):
        self.u64(len(b))
        self.buf += b

    def array(self, a, base_offset):
        a = np.ascontiguousarray(a)
        dt = a.dtype.newbyteorder("<").str.encode()
        self.u8(len(dt))
        self.buf += dt
        self.u8(a.ndim)
        for d in a.shape:
            self.u64(d)
        self.buf += b"\x00" * ((-(base_offset + len(self.buf))) % 8)
        self.buf += a.astype(a.dtype.newbyteorder("<"), copy=False).tobytes()


class _Reader:
    def __init__(self, buf, pos, end):
        self.buf = buf
        self.pos = pos
        self.end = end

    def _take(self, fmt):
        size = struct.calcsize(fmt)
        if self.pos + size > self.end:
            raise ContainerError("truncated section")
        (x,) = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += size
        return x

    def u8(self):
        return self._take("<B")

    def u32(self):
        return self._take("<I")

    def u64(self):
        return self._take("<Q")

    def i64(self):
        return self._take("<q")

    def blob(self):
        n = self.u64()
        out = bytes(self.buf[self.pos : self.pos + n])
        self.pos += n
        return out

    def array(self):
        size = self.u8()
        dt = np.dtype(bytes(self.buf[self.pos : self.pos + size]).decode())
        self.pos += size
        shape = tuple(self.u64() for _ in range(self.u8()))
        self.pos += (-self.pos) % 8
        count = int(np.prod(shape, dtype=np.int64))
        nbytes = count * dt.itemsize
        if self.pos + nbytes > self.end:
            raise ContainerError("truncated array")
        a = np.frombuffer(self.buf, dtype=dt, count=count, offset=self.pos).reshape(shape)
        self.pos += nbytes
        return a if dt.isnative else a.astype(dt.newbyteorder("="))


def _write_wt(w, wt, off):
    w.u64(wt.alphabet_size)
    w.u64(wt.length)
    w.array(wt.levels, off)
    w.array(wt.less, off)


def _read_wt(r):
    sigma, length = r.u64(), r.u64()
    return WaveletTree.from_arrays(sigma, length, r.array(), r.array())


def _sections(idx):
    o = idx.oracle
    out = []

    def section(fill):
        w = _Writer()
        # payload offset in the file: everything so far plus this section's length prefix
        fill(w, len(MAGIC) + 4 + sum(8 + len(s) for s in out) + 8)
        out.append(bytes(w.buf))

    def header(w, off):
        w.u8(o.mode)
        w.u32(o.w)
        w.u64(o.p)
        w.u64(o.kr_base)
        w.u64(o.kr_prime)
        w.u64(idx.n_phrases)
        triggers = o.explicit or ()
        w.u32(len(triggers))
        for t in triggers:
            w.blob(t)

    def char_fm(w, off):
        fm = idx.char_fm
        w.array(fm.code_of, off)
        w.array(fm.symbols, off)
        w.array(fm.c_array, off)
        _write_wt(w, fm.wt, off)

    def parse_fm(w, off):
        w.array(idx.parse_fm.c_array, off)
        _write_wt(w, idx.parse_fm.wt, off)

    def marks(w, off):
        w.u64(idx.b.n_bits)
        w.array(idx.b.blocks, off)

    def phrase_map(w, off):
        m = idx.phrase_map
        w.i64(m.seed)
        w.u64(m.base)
        for a in (m.keys, m.vals, m.data, m.offsets):
            w.array(a, off)

    def stats(w, off):
        w.array(idx.phrase_length_hist, off)

    for fill in (header, char_fm, parse_fm, marks, phrase_map, stats):
        section(fill)
    return out


def dumps(idx):
    out = bytearray(MAGIC)
    out += struct.pack("<I", VERSION)
    for s in _sections(idx):
        out += struct.pack("<Q", len(s))
        out += s
    out += struct.pack("<I", zlib.crc32(out))
    return bytes(out)


def save(idx, path):
    Path(path).write_bytes(dumps(idx))


def loads(data):
    buf = bytearray(data)
    if len(buf) < len(MAGIC) + 8 or bytes(buf[: len(MAGIC)]) != MAGIC:
        raise ContainerError("not an index container (bad magic)")
    (version,) = struct.unpack_from("<I", buf, len(MAGIC))
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}, expected {VERSION}")
    (crc,) = struct.unpack_from("<I", buf, len(buf) - 4)
    if zlib.crc32(memoryview(buf)[:-4]) != crc:
        raise ContainerError("checksum mismatch")

    pos = len(MAGIC) + 4
    readers = []
    for _ in range(6):
        if pos + 8 > len(buf) - 4:
            raise ContainerError("truncated container")
        (size,) = struct.unpack_from("<Q", buf, pos)
        readers.append(_Reader(buf, pos + 8, pos + 8 + size))
        pos += 8 + size
    if pos != len(buf) - 4:
        raise ContainerError("trailing bytes after last section")
    hdr, cfm, pfm, marks, pmap, stats = readers

    mode, w, p, kr_base, kr_prime, n_phrases = hdr.u8(), hdr.u32(), hdr.u64(), hdr.u64(), hdr.u64(), hdr.u64()
    triggers = tuple(hdr.blob() for _ in range(hdr.u32()))
    oracle = TriggerOracle(w=w, p=p, kr_base=kr_base, kr_prime=kr_prime,
                           explicit=triggers if mode == 1 else None)

    code_of, symbols, c_array = cfm.array(), cfm.array(), cfm.array()
    char_fm = CharFmIndex(_read_wt(cfm), c_array, code_of, symbols)
    c_p = pfm.array()
    parse_fm = ParseFmIndex(_read_wt(pfm), c_p)
    n_bits = marks.u64()
    b = BitVector.from_blocks(n_bits, marks.array())
    seed, base = pmap.i64(), pmap.u64()
    phrase_map = PhraseMap(seed, base, *(pmap.array() for _ in range(4)))
    return TwoLevelIndex(char_fm, parse_fm, b, phrase_map, oracle, int(n_phrases), stats.array())


def load(path):
    return loads(Path(path).read_bytes())
