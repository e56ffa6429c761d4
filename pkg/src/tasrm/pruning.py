"""Query-driven pruning for targeted rule mining.

* transaction filtering: drop sequences that lack the query antecedent;
* match-position map: per sequence, where the query antecedent is first fully
  matched (``left_end``, forward scan) and where the query consequent is
  fully matched scanning backward (``right_end``);
* item filtering: drop redundant query-item occurrences outside that window
  and infrequent items;
* seed admission: veto 1*1 rules whose items overshoot the smallest query item;
* expansion filtering: per-sequence scan windows, lexicographic bounds driven
  by the match state, and count-map upper bounds.

Sentinels for empty query sides: an empty antecedent query gives
``left_end = -1`` and an empty consequent query gives ``right_end = len(seq)``,
which turn every positional rule into a no-op.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .rulecore import QueryRule, RuleOccurrence
from .seqdb import Sequence, SequenceDatabase

LEFT = "left"
RIGHT = "right"


class TMPMEntry(NamedTuple):
    sid: int
    left_end: int
    right_end: int
    contains_yquery: bool


class MatchState(NamedTuple):
    x_match: int = 0
    y_match: int = 0

    def x_complete(self, qr: QueryRule) -> bool:
        return self.x_match == len(qr.antecedent)

    def y_complete(self, qr: QueryRule) -> bool:
        return self.y_match == len(qr.consequent)

    def complete(self, qr: QueryRule) -> bool:
        return self.x_complete(qr) and self.y_complete(qr)


@dataclass(frozen=True)
class CountMaps:
    """Upper bounds on the support a target rule can reach with a non-query
    item on either side. Query items are never recorded."""

    left: Mapping[int, int] = field(default_factory=dict)
    right: Mapping[int, int] = field(default_factory=dict)
    query_items: frozenset[int] = frozenset()
    removable: frozenset[int] = frozenset()

    def left_count(self, item: int) -> int:
        return self.left.get(item, 0)

    def right_count(self, item: int) -> int:
        return self.right.get(item, 0)

    def left_ok(self, item: int, minsup: int) -> bool:
        return item in self.query_items or self.left_count(item) >= minsup

    def right_ok(self, item: int, minsup: int) -> bool:
        return item in self.query_items or self.right_count(item) >= minsup


def utp_filter(db: SequenceDatabase, qr: QueryRule) -> tuple[SequenceDatabase, float]:
    """Keep the sequences containing every query antecedent item."""
    needed = set(qr.antecedent)
    kept = tuple(seq for seq in db if needed <= seq.items())
    rate = (len(db) - len(kept)) / len(db) if len(db) else 0.0
    return SequenceDatabase(kept), rate


def _forward_match(seq: Sequence, items: set[int]) -> int | None:
    missing = set(items)
    if not missing:
        return -1
    for k, itemset in enumerate(seq.itemsets):
        missing.difference_update(itemset)
        if not missing:
            return k
    return None


def _backward_match(seq: Sequence, items: set[int]) -> int | None:
    missing = set(items)
    if not missing:
        return len(seq.itemsets)
    for k in range(len(seq.itemsets) - 1, -1, -1):
        missing.difference_update(seq.itemsets[k])
        if not missing:
            return k
    return None


def build_tmpm(db: SequenceDatabase, qr: QueryRule) -> dict[int, TMPMEntry]:
    tmpm = {}
    xq, yq = set(qr.antecedent), set(qr.consequent)
    for seq in db:
        left_end = _forward_match(seq, xq)
        if left_end is None:
            raise ValueError(f"sequence {seq.sid} lacks the query antecedent; filter transactions first")
        right_end = _backward_match(seq, yq)
        if right_end is None:
            last = len(seq.itemsets) - 1
            tmpm[seq.sid] = TMPMEntry(seq.sid, last, last, False)
        else:
            tmpm[seq.sid] = TMPMEntry(seq.sid, left_end, right_end, True)
    return tmpm


def _count_maps_from_rows(rows: Mapping[int, list[set[int]]], tmpm: Mapping[int, TMPMEntry],
                          qr: QueryRule, minsup: int) -> CountMaps:
    query_items = qr.items
    left: dict[int, int] = {}
    right: dict[int, int] = {}
    seen: set[int] = set()
    for sid, itemsets in rows.items():
        entry = tmpm[sid]
        first: dict[int, int] = {}
        last: dict[int, int] = {}
        for idx, itemset in enumerate(itemsets):
            for item in itemset:
                if item in query_items:
                    continue
                first.setdefault(item, idx)
                last[item] = idx
        seen.update(first)
        if not entry.contains_yquery:
            continue
        for item, pos in first.items():
            if pos < entry.right_end:
                left[item] = left.get(item, 0) + 1
        for item, pos in last.items():
            if pos > entry.left_end:
                right[item] = right.get(item, 0) + 1
    removable = frozenset(e for e in seen if left.get(e, 0) + right.get(e, 0) < minsup)
    return CountMaps(left, right, query_items, removable)


def build_count_maps(db: SequenceDatabase, tmpm: Mapping[int, TMPMEntry], qr: QueryRule,
                     minsup: int) -> CountMaps:
    """Count, over sequences that contain the query consequent, how often each
    non-query item can still sit on the left (first position before
    ``right_end``) or on the right (last position after ``left_end``)."""
    rows = {seq.sid: [set(itemset) for itemset in seq.itemsets] for seq in db}
    return _count_maps_from_rows(rows, tmpm, qr, minsup)


def uip_filter(db: SequenceDatabase, tmpm: Mapping[int, TMPMEntry], qr: QueryRule, minsup: int,
               *, use_count_maps: bool = False) -> tuple[SequenceDatabase, dict[int, TMPMEntry]]:
    """Remove unpromising item occurrences and return the new database with
    its recomputed match-position map.

    Query antecedent items after ``left_end`` and query consequent items
    before ``right_end`` are deleted, then items whose support fell below
    ``minsup``. With ``use_count_maps`` the count-map removable items go too.
    Emptied itemsets are dropped, and so are sequences left without the query
    antecedent.
    """
    xq, yq = set(qr.antecedent), set(qr.consequent)
    rows: dict[int, list[set[int]]] = {}
    support: dict[int, int] = {}
    for seq in db:
        entry = tmpm[seq.sid]
        itemsets = []
        for idx, itemset in enumerate(seq.itemsets):
            kept = set(itemset)
            if idx > entry.left_end:
                kept -= xq
            if idx < entry.right_end:
                kept -= yq
            itemsets.append(kept)
        rows[seq.sid] = itemsets
        for item in set().union(*itemsets):
            support[item] = support.get(item, 0) + 1

    infrequent = {item for item, count in support.items() if count < minsup}
    for itemsets in rows.values():
        for itemset in itemsets:
            itemset -= infrequent

    if use_count_maps:
        # positions are still the original ones, so tmpm is valid here
        removable = _count_maps_from_rows(rows, tmpm, qr, minsup).removable
        for itemsets in rows.values():
            for itemset in itemsets:
                itemset -= removable

    sequences = []
    for seq in db:
        itemsets = tuple(tuple(sorted(s)) for s in rows[seq.sid] if s)
        if itemsets and xq <= set().union(*itemsets):
            sequences.append(Sequence(seq.sid, itemsets))
    filtered = SequenceDatabase(tuple(sequences))
    return filtered, build_tmpm(filtered, qr)


def urp_admits(m: int, n: int, qr: QueryRule, count_maps: CountMaps | None,
               minsup: int) -> tuple[bool, bool]:
    """Whether the seeds ``{m}->{n}`` and ``{n}->{m}`` may be generated."""

    def admit(left: int, right: int) -> bool:
        if qr.first_left is not None and left > qr.first_left:
            return False
        if qr.first_right is not None and right > qr.first_right:
            return False
        if count_maps is not None:
            return count_maps.left_ok(left, minsup) and count_maps.right_ok(right, minsup)
        return True

    return admit(m, n), admit(n, m)


def expansion_window(occ: RuleOccurrence, entry: TMPMEntry) -> tuple[int, int]:
    """``(expand_right, expand_left)``: right candidates lie strictly after the
    first value, left candidates strictly before the second."""
    return max(occ.first_itemset, entry.left_end), min(occ.last_itemset, entry.right_end)


def ueip_item_admissible(e: int, side: str, match: MatchState, qr: QueryRule,
                         count_maps: CountMaps | None, minsup: int) -> bool:
    if side == LEFT:
        query, pos = qr.antecedent, match.x_match
    elif side == RIGHT:
        query, pos = qr.consequent, match.y_match
    else:
        raise ValueError(f"unknown side {side!r}")
    if pos < len(query) and e > query[pos]:
        return False
    if count_maps is None:
        return True
    return count_maps.left_ok(e, minsup) if side == LEFT else count_maps.right_ok(e, minsup)


def advance_match(match: MatchState, side: str, e: int, qr: QueryRule) -> MatchState:
    if side == LEFT:
        if match.x_match < len(qr.antecedent) and qr.antecedent[match.x_match] == e:
            return match._replace(x_match=match.x_match + 1)
        return match
    if side == RIGHT:
        if match.y_match < len(qr.consequent) and qr.consequent[match.y_match] == e:
            return match._replace(y_match=match.y_match + 1)
        return match
    raise ValueError(f"unknown side {side!r}")
