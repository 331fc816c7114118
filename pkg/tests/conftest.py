import zlib

import numpy as np
import pytest

from pfpfm import TriggerOracle, build_index

GOLDEN_TEXT = b"TCCAGAAGAGTATCTCCTCGACATGTTGAAGACATATGAT"
GOLDEN_TRIGGERS = ["AA", "CG", "TA"]
GOLDEN_QUERY = b"CAGAAGAGTATCTCCTCGACATGTTGAAGACATAT"
GOLDEN_DICT = [b"$TCCAGAA", b"AAGACATA", b"AAGAGTA", b"CGACATGTTGAA", b"TATCTCCTCG", b"TATGAT$T"]

# the small prefix-free parsing example; '$' is the sentinel, '#' an ordinary byte
PFP_EXAMPLE_TEXT = b"AGACGACT#AGATACT#AGATTCGAGACGAC"
PFP_EXAMPLE_TRIGGERS = ["AC", "TC"]
PFP_EXAMPLE_DICT = [b"$AGAC", b"AC$A", b"ACGAC", b"ACT#AGATAC", b"ACT#AGATTC", b"TCGAGAC"]

ACCEPTANCE = []


def dollar(phrase):
    return phrase.replace(b"\x00", b"$")


def naive_count(text, q):
    """Overlapping occurrences of ``q`` in ``text`` by repeated find."""
    n = 0
    i = text.find(q)
    while i >= 0:
        n += 1
        i = text.find(q, i + 1)
    return n


def naive_suffix_array(s):
    s = list(s)
    return sorted(range(len(s)), key=lambda i: s[i:])


@pytest.fixture(scope="session")
def golden_oracle():
    return TriggerOracle.explicit_set(GOLDEN_TRIGGERS)


@pytest.fixture(scope="session")
def golden_index(golden_oracle):
    return build_index(GOLDEN_TEXT, golden_oracle)


@pytest.fixture
def rng(request):
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
