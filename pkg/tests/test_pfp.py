import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfpfm import (
    Dictionary,
    NoTrigger,
    NotInDictionary,
    PartialEncoding,
    TriggerOracle,
    build_phrase_map,
    find_triggers,
    parse_query,
    parse_text,
)
from pfpfm.pfp import (
    MERSENNE61,
    _scan_numpy,
    kr_hash,
    mulmod61,
    mulmod61_array,
    window_hashes,
    with_sentinel,
)

from .conftest import (
    GOLDEN_DICT,
    GOLDEN_QUERY,
    GOLDEN_TEXT,
    GOLDEN_TRIGGERS,
    PFP_EXAMPLE_DICT,
    PFP_EXAMPLE_TEXT,
    PFP_EXAMPLE_TRIGGERS,
    dollar,
)


def golden_parse(text, triggers):
    oracle = TriggerOracle.explicit_set(triggers)
    return parse_text(with_sentinel(text), oracle)


def test_text_example_dictionary_and_parse():
    d, p = golden_parse(GOLDEN_TEXT, GOLDEN_TRIGGERS)
    assert [dollar(ph) for ph in d] == GOLDEN_DICT
    assert p.phrase_ids.tolist() == [0, 2, 4, 3, 1, 5]
    assert p.phrase_ids.dtype == np.uint32


def test_text_example_triggers():
    oracle = TriggerOracle.explicit_set(GOLDEN_TRIGGERS)
    t = find_triggers(with_sentinel(GOLDEN_TEXT), oracle, cyclic=True)
    assert t.tolist() == [5, 10, 18, 28, 34, 40]


def test_parsing_example_dictionary_and_parse():
    d, p = golden_parse(PFP_EXAMPLE_TEXT, PFP_EXAMPLE_TRIGGERS)
    assert [dollar(ph) for ph in d] == PFP_EXAMPLE_DICT
    assert p.phrase_ids.tolist() == [0, 2, 3, 4, 5, 2, 1]


def test_dictionary_is_prefix_free():
    for text, trig in [(GOLDEN_TEXT, GOLDEN_TRIGGERS), (PFP_EXAMPLE_TEXT, PFP_EXAMPLE_TRIGGERS)]:
        d, _ = golden_parse(text, trig)
        assert d.is_prefix_free()
    assert not Dictionary((b"AB", b"ABC")).is_prefix_free()


def test_sentinel_phrase_gets_id_zero():
    d, p = golden_parse(b"GGGGGGGG", ["AA"])
    assert len(d) == 1 and p.phrase_ids.tolist() == [0]
    assert d[0] == b"\x00GGGGGGGG\x00G"


def test_no_sentinel_windows_are_triggers():
    oracle = TriggerOracle.hashed(3, 1)
    t = find_triggers(b"ACGT\x00", oracle, cyclic=True)
    # every window lying inside the body triggers, plus the sentinel
    assert t.tolist() == [0, 1, 4]


def test_cyclic_requires_single_final_sentinel():
    oracle = TriggerOracle.hashed(2, 1)
    for bad in [b"AC", b"A\x00C\x00", b"\x00AC"]:
        with pytest.raises(ValueError):
            find_triggers(bad, oracle, cyclic=True)


@pytest.mark.parametrize("bad", [b"", b"AC\x00GT"])
def test_with_sentinel_rejects(bad):
    with pytest.raises(ValueError):
        with_sentinel(bad)


def test_oracle_validation(tmp_path):
    with pytest.raises(ValueError):
        TriggerOracle.explicit_set(["AA", "CGT"])
    with pytest.raises(ValueError):
        TriggerOracle.hashed(0, 10)
    with pytest.raises(ValueError):
        TriggerOracle.hashed(4, 0)
    f = tmp_path / "t.txt"
    f.write_text("AA\nCG\n\nTA\n")
    assert TriggerOracle.from_file(f) == TriggerOracle.explicit_set(GOLDEN_TRIGGERS)


def test_mulmod61_against_bigint(rng):
    a = rng.integers(0, MERSENNE61, 500)
    b = rng.integers(0, MERSENNE61, 500)
    expected = [(int(x) * int(y)) % MERSENNE61 for x, y in zip(a, b)]
    assert [mulmod61(int(x), int(y)) for x, y in zip(a, b)] == expected
    assert mulmod61_array(a, b).tolist() == expected
    assert mulmod61(MERSENNE61 - 1, MERSENNE61 - 1) == 1


def naive_hash_triggers(text, w, p, base):
    return [i for i in range(len(text) - w + 1) if kr_hash(text[i : i + w], base) % p == 0]


@pytest.mark.parametrize("w, p", [(1, 3), (4, 10), (6, 50), (10, 100)])
def test_hash_triggers_against_naive(w, p, rng):
    text = rng.integers(65, 70, 3000).astype(np.uint8).tobytes()
    oracle = TriggerOracle.hashed(w, p)
    expected = naive_hash_triggers(text, w, p, oracle.kr_base)
    assert find_triggers(text, oracle).tolist() == expected
    assert _scan_numpy(np.frombuffer(text, np.uint8), oracle).tolist() == expected
    assert all(oracle.is_trigger(text[i : i + w]) for i in expected)


def test_window_hashes_match_reference(rng):
    arr = rng.integers(0, 256, 200).astype(np.uint8)
    base = TriggerOracle.hashed(5, 1).kr_base
    h = window_hashes(arr, 5, base)
    assert h.tolist() == [kr_hash(arr[i : i + 5].tobytes(), base) for i in range(196)]


def test_explicit_scan_matches_numpy(rng):
    text = rng.integers(65, 69, 5000).astype(np.uint8).tobytes()
    trig = sorted({text[i : i + 3] for i in rng.integers(0, 4990, 8)})
    oracle = TriggerOracle.explicit_set(trig)
    expected = [i for i in range(len(text) - 2) if text[i : i + 3] in trig]
    assert find_triggers(text, oracle).tolist() == expected
    assert _scan_numpy(np.frombuffer(text, np.uint8), oracle).tolist() == expected


def test_text_shorter_than_window():
    oracle = TriggerOracle.hashed(8, 1)
    assert find_triggers(b"ACG", oracle).tolist() == []
    d, p = parse_text(with_sentinel(b"ACG"), oracle)
    assert len(p) == 1 and d[0].startswith(b"\x00ACG\x00")


def test_phrase_map_lookup_on_text_example():
    d, _ = golden_parse(GOLDEN_TEXT, GOLDEN_TRIGGERS)
    pm = build_phrase_map(d)
    assert pm.lookup(b"AAGAGTA") == 2
    assert pm.lookup(b"AAGAGT") is None
    assert pm.lookup(b"AAGAGTAT") is None
    assert [pm.phrase(i) for i in range(len(d))] == list(d)


def test_phrase_map_random_dictionary(rng):
    words = {rng.integers(65, 91, int(rng.integers(1, 30))).astype(np.uint8).tobytes() for _ in range(3000)}
    d = Dictionary(tuple(sorted(words)))
    pm = build_phrase_map(d, seed=7)
    for i, ph in enumerate(d):
        assert pm.lookup(ph) == i
    for _ in range(500):
        probe = rng.integers(65, 91, int(rng.integers(1, 30))).astype(np.uint8).tobytes()
        assert pm.lookup(probe) == (d.phrases.index(probe) if probe in words else None)


def test_parse_query_golden():
    oracle = TriggerOracle.explicit_set(GOLDEN_TRIGGERS)
    d, _ = golden_parse(GOLDEN_TEXT, GOLDEN_TRIGGERS)
    enc = parse_query(GOLDEN_QUERY, oracle, build_phrase_map(d))
    assert enc == PartialEncoding(b"CAGAA", (2, 4, 3, 1), b"TAT", 2)
    assert enc.reconstruct(d) == GOLDEN_QUERY


def test_parse_query_other_outcomes():
    oracle = TriggerOracle.explicit_set(GOLDEN_TRIGGERS)
    d, _ = golden_parse(GOLDEN_TEXT, GOLDEN_TRIGGERS)
    pm = build_phrase_map(d)
    assert parse_query(b"GAGT", oracle, pm) == NoTrigger(b"GAGT")
    assert parse_query(b"AACCCTA", oracle, pm) == NotInDictionary(b"AACCCTA")
    enc = parse_query(b"AAGAG", oracle, pm)
    assert enc.alpha == b"" and enc.mid_phrase_ids == () and enc.beta == b"AAGAG"
    with pytest.raises(ValueError):
        parse_query(b"", oracle, pm)


@settings(max_examples=60, deadline=None)
@given(st.binary(min_size=1, max_size=300).map(lambda b: bytes((x % 3) + 65 for x in b)), st.integers(2, 4))
def test_parse_reconstructs_text(body, w):
    oracle = TriggerOracle.hashed(w, 3)
    text = with_sentinel(body)
    d, p = parse_text(text, oracle)
    assert d.is_prefix_free()
    ids = p.phrase_ids.tolist()
    assert d[ids[0]][:1] == b"\x00"
    rebuilt = b"".join(d[i][:-w] for i in ids)
    # the parse spells the text rotated to start at the sentinel
    assert rebuilt == text[-1:] + text[:-1]
