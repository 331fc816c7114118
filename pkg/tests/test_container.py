import struct

import numpy as np
import pytest

from pfpfm import ContainerError, TriggerOracle, build_index, count_many, load, save
from pfpfm.container import MAGIC, dumps, loads

from .conftest import GOLDEN_QUERY, GOLDEN_TEXT


def same_counts(a, b, pats):
    assert count_many(a, pats).tolist() == count_many(b, pats).tolist()


def test_round_trip_explicit(golden_index, tmp_path):
    path = tmp_path / "idx.pfm"
    save(golden_index, path)
    back = load(path)
    assert back.oracle == golden_index.oracle
    assert back.b.ones().tolist() == golden_index.b.ones().tolist()
    assert back.phrase_map.lookup(b"AAGAGTA") == 2
    assert np.array_equal(back.phrase_length_hist, golden_index.phrase_length_hist)
    same_counts(golden_index, back, [GOLDEN_QUERY, b"A", b"TAT", b"GGG"])


def test_round_trip_hashed(rng):
    text = np.frombuffer(b"ACGT", np.uint8)[rng.integers(0, 4, 5000)].tobytes()
    idx = build_index(text, TriggerOracle.hashed(4, 10), seed=3)
    back = loads(dumps(idx))
    assert back.phrase_map.seed == idx.phrase_map.seed
    pats = [text[i : i + 30] for i in range(0, 4900, 37)]
    same_counts(idx, back, pats)
    assert dumps(back) == dumps(idx)


def test_rejects_bad_magic(golden_index):
    data = bytearray(dumps(golden_index))
    data[0] ^= 1
    with pytest.raises(ContainerError, match="magic"):
        loads(bytes(data))


def test_rejects_version_mismatch(golden_index):
    data = bytearray(dumps(golden_index))
    struct.pack_into("<I", data, len(MAGIC), 99)
    with pytest.raises(ContainerError, match="version"):
        loads(bytes(data))


def test_rejects_corruption(golden_index):
    data = bytearray(dumps(golden_index))
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(ContainerError, match="checksum"):
        loads(bytes(data))


@pytest.mark.parametrize("keep", [0, 5, 20, 100])
def test_rejects_truncation(golden_index, keep):
    with pytest.raises(ContainerError):
        loads(dumps(golden_index)[:keep])
