"""Sequence databases: data model, SPMF I/O, item indexing, statistics and a
seeded synthetic generator.

Items are non-negative integers and their numeric order is the lexicographic
order used throughout the miner. Itemset positions inside a sequence are
0-based.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np

Itemset = tuple[int, ...]


class SpmfParseError(ValueError):
    """Raised for malformed SPMF input; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def make_itemset(items: Iterable[int]) -> Itemset:
    """Sort and de-duplicate ``items``."""
    return tuple(sorted(set(items)))


@dataclass(frozen=True)
class Sequence:
    sid: int
    itemsets: tuple[Itemset, ...]

    def __post_init__(self) -> None:
        for itemset in self.itemsets:
            if not itemset:
                raise ValueError(f"sequence {self.sid} has an empty itemset")
            if any(a >= b for a, b in zip(itemset, itemset[1:])):
                raise ValueError(f"sequence {self.sid}: itemset {itemset} is not strictly increasing")

    def __len__(self) -> int:
        return len(self.itemsets)

    def items(self) -> set[int]:
        return {item for itemset in self.itemsets for item in itemset}


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[Sequence, ...] = ()

    def __post_init__(self) -> None:
        sids = [s.sid for s in self.sequences]
        if len(set(sids)) != len(sids):
            raise ValueError("sequence ids must be distinct")

    @classmethod
    def from_lists(cls, rows: Iterable[Iterable[Iterable[int]]],
                   sids: Iterable[int] | None = None) -> "SequenceDatabase":
        """Build a database from nested lists, normalizing every itemset.

        Sids default to 0..n-1 in input order.
        """
        rows = [[make_itemset(itemset) for itemset in row] for row in rows]
        sids = list(range(len(rows))) if sids is None else list(sids)
        if len(sids) != len(rows):
            raise ValueError("one sid per sequence is required")
        return cls(tuple(Sequence(sid, tuple(row)) for sid, row in zip(sids, rows)))

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[Sequence]:
        return iter(self.sequences)

    def by_sid(self) -> dict[int, Sequence]:
        return {s.sid: s for s in self.sequences}

    def items(self) -> set[int]:
        out: set[int] = set()
        for seq in self.sequences:
            out |= seq.items()
        return out

    def as_lists(self) -> list[list[list[int]]]:
        return [[list(itemset) for itemset in seq.itemsets] for seq in self.sequences]


# ---------------------------------------------------------------------------
# SPMF format

_COMMENT_PREFIXES = ("#", "%", "@")


def parse_spmf(source: str | TextIO) -> SequenceDatabase:
    """Parse SPMF sequence text (``-1`` ends an itemset, ``-2`` a sequence).

    Comment/metadata lines starting with ``#``, ``%`` or ``@`` and blank lines
    are skipped. Unsorted or duplicated items inside an itemset are normalized.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    rows: list[list[Itemset]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        row: list[Itemset] = []
        pending: list[int] = []
        terminated = False
        for token in line.split():
            if terminated:
                raise SpmfParseError(lineno, f"token {token!r} after -2 terminator")
            try:
                value = int(token)
            except ValueError:
                raise SpmfParseError(lineno, f"malformed token {token!r}") from None
            if value == -1:
                if not pending:
                    raise SpmfParseError(lineno, "itemset with no items before -1")
                row.append(make_itemset(pending))
                pending = []
            elif value == -2:
                if pending:
                    raise SpmfParseError(lineno, "itemset not terminated by -1 before -2")
                if not row:
                    raise SpmfParseError(lineno, "sequence with no itemsets before -2")
                terminated = True
            elif value < 0:
                raise SpmfParseError(lineno, f"negative item {value}")
            else:
                pending.append(value)
        if not terminated:
            raise SpmfParseError(lineno, "missing -2 terminator")
        rows.append(row)
    return SequenceDatabase.from_lists(rows)


def write_spmf(db: SequenceDatabase) -> str:
    lines = []
    for seq in db:
        tokens = []
        for itemset in seq.itemsets:
            tokens.extend(str(item) for item in itemset)
            tokens.append("-1")
        tokens.append("-2")
        lines.append(" ".join(tokens))
    return "".join(line + "\n" for line in lines)


def read_spmf_file(path) -> SequenceDatabase:
    with open(path, encoding="utf-8") as fh:
        return parse_spmf(fh)


# ---------------------------------------------------------------------------
# Item index

@dataclass(frozen=True)
class ItemIndex:
    """Per item: sid -> (first itemset index, last itemset index)."""

    positions: Mapping[int, Mapping[int, tuple[int, int]]]

    def support(self, item: int) -> int:
        return len(self.positions.get(item, ()))

    def sids(self, item: int) -> frozenset[int]:
        return frozenset(self.positions.get(item, ()))

    def first_pos(self, item: int, sid: int) -> int:
        return self.positions[item][sid][0]

    def last_pos(self, item: int, sid: int) -> int:
        return self.positions[item][sid][1]

    def frequent_items(self, minsup: int) -> list[int]:
        return sorted(item for item, occ in self.positions.items() if len(occ) >= minsup)

    def __contains__(self, item: int) -> bool:
        return item in self.positions

    def __len__(self) -> int:
        return len(self.positions)


def build_item_index(db: SequenceDatabase) -> ItemIndex:
    positions: dict[int, dict[int, tuple[int, int]]] = {}
    for seq in db:
        for idx, itemset in enumerate(seq.itemsets):
            for item in itemset:
                per_sid = positions.setdefault(item, {})
                if seq.sid in per_sid:
                    per_sid[seq.sid] = (per_sid[seq.sid][0], idx)
                else:
                    per_sid[seq.sid] = (idx, idx)
    return ItemIndex(positions)


# ---------------------------------------------------------------------------
# Statistics

@dataclass(frozen=True)
class DatasetStats:
    num_sequences: int
    num_items: int
    avg_items_per_itemset: float
    avg_itemsets_per_sequence: float

    def __str__(self) -> str:
        return (f"|D|={self.num_sequences} |I|={self.num_items} "
                f"AVI={self.avg_items_per_itemset:.2f} AVL={self.avg_itemsets_per_sequence:.2f}")

    def as_dict(self) -> dict:
        return {
            "numSequences": self.num_sequences,
            "numItems": self.num_items,
            "avgItemsPerItemset": self.avg_items_per_itemset,
            "avgItemsetsPerSequence": self.avg_itemsets_per_sequence,
        }


def dataset_stats(db: SequenceDatabase) -> DatasetStats:
    n_itemsets = sum(len(seq) for seq in db)
    n_occurrences = sum(len(itemset) for seq in db for itemset in seq.itemsets)
    return DatasetStats(
        num_sequences=len(db),
        num_items=len(db.items()),
        avg_items_per_itemset=n_occurrences / n_itemsets if n_itemsets else 0.0,
        avg_itemsets_per_sequence=n_itemsets / len(db) if len(db) else 0.0,
    )


# ---------------------------------------------------------------------------
# Synthetic data

def generate_synthetic(num_sequences: int, alphabet_size: int, avg_itemsets_per_seq: float,
                       avg_items_per_itemset: float, seed: int, *,
                       skew: float = 1.0) -> SequenceDatabase:
    """Generate a random sequence database.

    Sequence lengths are ``1 + Poisson(avg_itemsets_per_seq - 1)`` and itemset
    sizes ``1 + Poisson(avg_items_per_itemset - 1)`` (capped at the alphabet
    size), so both means match the request. Items ``1..alphabet_size`` are
    drawn with Zipf-like popularity ``1 / rank**skew``; item 1 is the most
    common. Sequences are produced one after another from a single stream, so
    a smaller database is a prefix of a larger one built with the same seed.
    """
    if min(num_sequences, alphabet_size, avg_itemsets_per_seq, avg_items_per_itemset) < 1:
        raise ValueError("all generator parameters must be >= 1")
    if alphabet_size < avg_items_per_itemset:
        raise ValueError("alphabet_size must be at least avg_items_per_itemset")

    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, alphabet_size + 1, dtype=float) ** skew
    cum = np.cumsum(weights / weights.sum())
    cum[-1] = 1.0

    rows = []
    for _ in range(num_sequences):
        n_itemsets = 1 + int(rng.poisson(avg_itemsets_per_seq - 1))
        row = []
        for _ in range(n_itemsets):
            size = min(1 + int(rng.poisson(avg_items_per_itemset - 1)), alphabet_size)
            chosen: set[int] = set()
            while len(chosen) < size:
                draws = np.searchsorted(cum, rng.random(size - len(chosen)), side="right") + 1
                chosen.update(int(d) for d in draws)
            row.append(chosen)
        rows.append(row)
    return SequenceDatabase.from_lists(rows)
