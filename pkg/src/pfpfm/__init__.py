"""Two-level FM-index over a prefix-free parse of the text."""

from ._backend import BACKEND
from .container import ContainerError, load, save
from .index import (
    EMPTY,
    CharFmIndex,
    Interval,
    ParseFmIndex,
    TwoLevelIndex,
    backward_search,
    build_index,
    count,
    count_baseline,
    count_many,
    map_char_to_parse,
    map_parse_to_char,
)
from .pfp import (
    Dictionary,
    NoTrigger,
    NotInDictionary,
    ParseResult,
    PartialEncoding,
    PhraseMap,
    TriggerOracle,
    build_phrase_map,
    find_triggers,
    parse_query,
    parse_text,
)
from .succinct import BitVector, NoSuchOccurrence, WaveletTree
from .suffix import build_c_array, build_suffix_array, bwt_from_sa, invert_bwt

__version__ = "0.1.0"
