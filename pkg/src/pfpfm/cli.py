"""Command-line interface: ``build``, ``count``, ``sample`` and ``bench``."""

import argparse
import logging
import sys
from pathlib import Path

from . import container
from .bench import DEFAULT_LENGTHS, DEFAULT_P, DEFAULT_W, BenchMismatch, run_bench, write_csv
from .corpus import read_text, sample_patterns
from .index import build_index, count_many, pack_patterns
from .pfp import PhraseOverflowError, TriggerOracle


class CliError(Exception):
    pass


def _int_list(s):
    try:
        values = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def read_patterns(path):
    lines = Path(path).read_bytes().split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    patterns = []
    for i, line in enumerate(lines):
        line = line.rstrip(b"\r")
        if not line:
            raise CliError(f"{path}: empty pattern on line {i + 1}")
        patterns.append(line)
    return patterns


def cmd_build(args):
    text = read_text(args.input)
    if args.triggers:
        oracle = TriggerOracle.from_file(args.triggers, w=args.w)
    else:
        oracle = TriggerOracle.hashed(args.w or 6, args.p)
    idx = build_index(text, oracle, seed=args.seed)
    container.save(idx, args.output)
    s = idx.summary()
    print(
        f"n={s['n']} |D|={s['dictionary_size']} |P|={s['parse_len']} "
        f"mean_phrase_len={s['mean_phrase_len']:.2f}",
        file=sys.stderr,
    )


def cmd_count(args):
    idx = container.load(args.index)
    patterns = read_patterns(args.patterns)
    if not patterns:
        return
    counts = count_many(idx, pack_patterns(patterns), baseline=args.baseline)
    sys.stdout.write("".join(f"{i}\t{c}\n" for i, c in enumerate(counts.tolist())))


def cmd_sample(args):
    text = read_text(args.input)
    if args.length > len(text):
        raise CliError(f"pattern length {args.length} exceeds text length {len(text)}")
    patterns = sample_patterns(text, args.length, args.num, seed=args.seed)
    if any(b"\n" in q or b"\r" in q for q in patterns):
        raise CliError("sampled patterns contain line breaks; use FASTA or single-line input")
    data = b"".join(q + b"\n" for q in patterns)
    if args.output == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(args.output).write_bytes(data)


def cmd_bench(args):
    text = read_text(args.input)
    records = run_bench(text, args.w_list, args.p_list, args.lengths, args.num, args.seed, args.repeats)
    if args.csv == "-":
        write_csv(records, sys.stdout)
    else:
        with open(args.csv, "w", newline="") as fh:
            write_csv(records, fh)


def build_parser():
    parser = argparse.ArgumentParser(prog="pfpfm", description="Two-level prefix-free-parse FM-index.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index from FASTA or raw text")
    b.add_argument("input")
    b.add_argument("output")
    b.add_argument("-w", type=int, default=None, help="trigger window length (default 6)")
    group = b.add_mutually_exclusive_group()
    group.add_argument("-p", type=int, default=50, help="trigger modulus (default 50)")
    group.add_argument("--triggers", help="file with one explicit trigger string per line")
    b.add_argument("--seed", type=int, default=0, help="phrase fingerprint seed")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("count", help="count occurrences of each pattern")
    c.add_argument("index")
    c.add_argument("patterns", help="one pattern per line")
    c.add_argument("--baseline", action="store_true", help="use plain character-level backward search")
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("sample", help="sample random substrings of a text")
    s.add_argument("input")
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--num", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_sample)

    h = sub.add_parser("bench", help="sweep (w, p) and pattern length, emit CSV")
    h.add_argument("input")
    h.add_argument("--w-list", type=_int_list, default=list(DEFAULT_W))
    h.add_argument("--p-list", type=_int_list, default=list(DEFAULT_P))
    h.add_argument("--lengths", type=_int_list, default=list(DEFAULT_LENGTHS))
    h.add_argument("--num", type=int, default=1000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--repeats", type=int, default=3, help="timed runs per batch; the best is kept")
    h.add_argument("--csv", default="-")
    h.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (CliError, OSError, ValueError, PhraseOverflowError, BenchMismatch) as e:
        print(f"pfpfm {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
