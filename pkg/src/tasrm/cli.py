"""Command-line front end: ``mine``, ``bench``, ``gen`` and ``stats``.

Exit codes: 0 success, 1 input/config error, 2 usage error, 3 internal error
(variant outputs diverged during ``bench``).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .miner import ALL_VARIANTS, MinerConfig, MiningResult, Variant, mine
from .rulecore import QueryRule
from .seqdb import SequenceDatabase, dataset_stats, generate_synthetic, read_spmf_file, write_spmf

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

_UNSIGNED = re.compile(r"\d+")


class UsageError(ValueError):
    pass


class DivergenceError(RuntimeError):
    pass


def parse_query(text: str) -> QueryRule:
    """Parse ``"1,2=>3"``; either side may be empty."""
    if "=>" not in text:
        raise UsageError(f"query {text!r} lacks '=>'")
    left, _, right = text.strip().partition("=>")

    def side(part: str) -> tuple[int, ...]:
        part = part.strip()
        if not part:
            return ()
        tokens = [t.strip() for t in part.split(",")]
        bad = [t for t in tokens if not _UNSIGNED.fullmatch(t)]
        if bad:
            raise UsageError(f"query item {bad[0]!r} is not an unsigned integer")
        return tuple(sorted({int(t) for t in tokens}))

    x, y = side(left), side(right)
    if set(x) & set(y):
        raise UsageError(f"query sides overlap on {sorted(set(x) & set(y))}")
    return QueryRule(x, y)


def resolve_minsup(text: str, num_sequences: int) -> int:
    """An integer literal is an absolute count; anything else is a fraction of |D|."""
    text = text.strip()
    if _UNSIGNED.fullmatch(text):
        value = int(text)
        if value < 1:
            raise UsageError("absolute minsup must be >= 1")
        return value
    try:
        fraction = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"minsup {text!r} is neither an integer nor a fraction") from None
    if not 0 < fraction <= 1:
        raise UsageError("relative minsup must lie in (0, 1]")
    return max(1, math.ceil(fraction * num_sequences))


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` so that ``path`` either holds all of it or is untouched."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path: str | None, text: str) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def render_rules(result: MiningResult) -> str:
    return "".join(rule.render() + "\n" for rule in result.rules)


def _config(args: argparse.Namespace, db: SequenceDatabase, variant: Variant) -> MinerConfig:
    return MinerConfig(resolve_minsup(args.minsup, len(db)), args.minconf, variant,
                       args.max_antecedent, args.max_consequent)


def _variant_stats(result: MiningResult) -> dict:
    s = result.stats
    out = {
        "rulesEmitted": s.rules_emitted,
        "expansionsLeft": s.expansions_left,
        "expansionsRight": s.expansions_right,
        "expansions": s.expansions,
        "seedPairsEvaluated": s.seed_pairs_evaluated,
        "filteringRate": s.filtering_rate,
        "elapsedMillis": round(s.elapsed_seconds * 1000.0, 3),
    }
    if s.peak_memory_bytes is not None:
        out["peakMemoryBytes"] = s.peak_memory_bytes
    return out


def run_mine(args: argparse.Namespace) -> int:
    db = read_spmf_file(args.input)
    qr = parse_query(args.query)
    config = _config(args, db, Variant(args.variant))
    result = mine(db, qr, config)
    stats = {
        "variant": config.variant.value,
        "minsup": config.minsup,
        "minconf": config.minconf,
        "query": str(qr),
    }
    stats.update(_variant_stats(result))
    del stats["expansions"]
    stats["datasetStats"] = dataset_stats(db).as_dict()
    _emit(args.output, render_rules(result))
    if args.stats:
        write_atomic(args.stats, json.dumps(stats, indent=2) + "\n")
    return EXIT_OK


def run_bench(args: argparse.Namespace) -> dict:
    """Mine with every variant, prove the outputs agree, return the report."""
    db = read_spmf_file(args.input)
    qr = parse_query(args.query)
    results = {}
    for variant in ALL_VARIANTS:
        config = _config(args, db, variant)
        results[variant] = mine(db, qr, config, track_memory=args.memory)
    reference = results[Variant.BASELINE].rules
    for variant, result in results.items():
        if result.rules != reference:
            raise DivergenceError(f"{variant.value} emitted {len(result.rules)} rules, "
                                  f"baseline emitted {len(reference)}")
    return {
        "config": {
            "input": str(args.input),
            "query": str(qr),
            "minsup": config.minsup,
            "minconf": config.minconf,
            "maxAntecedent": config.max_antecedent,
            "maxConsequent": config.max_consequent,
        },
        "datasetStats": dataset_stats(db).as_dict(),
        "outputsIdentical": True,
        "variants": {v.value: _variant_stats(r) for v, r in results.items()},
    }


def _bench_command(args: argparse.Namespace) -> int:
    report = run_bench(args)
    _emit(args.output, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def run_gen(args: argparse.Namespace) -> int:
    db = generate_synthetic(args.sequences, args.items, args.avg_itemsets, args.avg_items, args.seed)
    _emit(args.output, write_spmf(db))
    return EXIT_OK


def run_stats(args: argparse.Namespace) -> int:
    stats = dataset_stats(read_spmf_file(args.input))
    _emit(args.output, f"{stats}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tasrm", description="Targeted sequential rule mining.")
    sub = parser.add_subparsers(dest="command", required=True)

    mining = argparse.ArgumentParser(add_help=False)
    mining.add_argument("--input", required=True, help="SPMF sequence database")
    mining.add_argument("--query", default="=>", help="query rule such as '1,2=>3' (default: empty)")
    mining.add_argument("--minsup", required=True,
                        help="absolute count (integer) or fraction of |D| (e.g. 0.01)")
    mining.add_argument("--minconf", required=True, type=float)
    mining.add_argument("--max-antecedent", type=int, default=None)
    mining.add_argument("--max-consequent", type=int, default=None)
    mining.add_argument("--output", help="destination file (default: stdout)")

    p = sub.add_parser("mine", parents=[mining], help="mine target rules")
    p.add_argument("--variant", choices=[v.value for v in ALL_VARIANTS], default=Variant.V3.value)
    p.add_argument("--stats", help="write run statistics as JSON here")
    p.set_defaults(handler=run_mine)

    p = sub.add_parser("bench", parents=[mining], help="run all variants and compare")
    p.add_argument("--memory", action="store_true", help="record peak traced memory per variant")
    p.set_defaults(handler=_bench_command)

    p = sub.add_parser("gen", help="write a synthetic SPMF database")
    p.add_argument("--sequences", type=int, required=True)
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--avg-itemsets", type=float, required=True)
    p.add_argument("--avg-items", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="destination file (default: stdout)")
    p.set_defaults(handler=run_gen)

    p = sub.add_parser("stats", help="print dataset statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="destination file (default: stdout)")
    p.set_defaults(handler=run_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"tasrm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"tasrm {args.command}: internal error, variant outputs diverge: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (OSError, ValueError) as exc:
        print(f"tasrm {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
