"""Partially-ordered sequential rules: occurrence, support, confidence,
target containment, and an exhaustive enumeration oracle.

A rule ``X -> Y`` occurs in a sequence of ``n`` itemsets when some split
``0 <= k <= n - 2`` puts every item of X in itemsets ``0..k`` and every item
of Y in itemsets ``k+1..n-1``. Nothing in this module shares code with the
miner, so it can be used to check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple

from .seqdb import Itemset, Sequence, SequenceDatabase, make_itemset


def _fmt_items(items: Iterable[int]) -> str:
    return ",".join(str(i) for i in items)


@dataclass(frozen=True)
class SequentialRule:
    antecedent: Itemset
    consequent: Itemset
    support: int
    confidence: float

    def __post_init__(self) -> None:
        _check_sides(self.antecedent, self.consequent)

    @property
    def size(self) -> tuple[int, int]:
        return len(self.antecedent), len(self.consequent)

    def render(self) -> str:
        """``1,2 ==> 3 #SUP: 3 #CONF: 0.7500``"""
        return (f"{_fmt_items(self.antecedent)} ==> {_fmt_items(self.consequent)} "
                f"#SUP: {self.support} #CONF: {self.confidence:.4f}")

    def sort_key(self) -> tuple:
        return len(self.antecedent) + len(self.consequent), self.antecedent, self.consequent

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class QueryRule:
    """Target template: rules must contain ``antecedent`` on the left and
    ``consequent`` on the right. Either side may be empty."""

    antecedent: Itemset = ()
    consequent: Itemset = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", make_itemset(self.antecedent))
        object.__setattr__(self, "consequent", make_itemset(self.consequent))
        if set(self.antecedent) & set(self.consequent):
            raise ValueError("query rule sides must be disjoint")

    @property
    def first_left(self) -> int | None:
        return self.antecedent[0] if self.antecedent else None

    @property
    def first_right(self) -> int | None:
        return self.consequent[0] if self.consequent else None

    @property
    def items(self) -> frozenset[int]:
        return frozenset(self.antecedent) | frozenset(self.consequent)

    def is_empty(self) -> bool:
        return not self.antecedent and not self.consequent

    def __str__(self) -> str:
        return f"{_fmt_items(self.antecedent)}=>{_fmt_items(self.consequent)}"


class RuleOccurrence(NamedTuple):
    first_itemset: int
    last_itemset: int


def _check_sides(x: Itemset, y: Itemset) -> None:
    if not x or not y:
        raise ValueError("rule sides must be non-empty")
    if set(x) & set(y):
        raise ValueError("rule sides must be disjoint")


def rule_occurs(seq: Sequence, x: Itemset, y: Itemset) -> bool:
    _check_sides(x, y)
    xs, ys = set(x), set(y)
    n = len(seq.itemsets)
    for k in range(n - 1):
        prefix = set().union(*seq.itemsets[:k + 1])
        suffix = set().union(*seq.itemsets[k + 1:])
        if xs <= prefix and ys <= suffix:
            return True
    return False


def _prefix_completion(seq: Sequence, items: set[int]) -> int | None:
    """Smallest k such that ``items`` is covered by itemsets 0..k."""
    missing = set(items)
    for k, itemset in enumerate(seq.itemsets):
        missing.difference_update(itemset)
        if not missing:
            return k
    return None


def _suffix_completion(seq: Sequence, items: set[int]) -> int | None:
    """Largest k such that ``items`` is covered by itemsets k..end."""
    missing = set(items)
    for k in range(len(seq.itemsets) - 1, -1, -1):
        missing.difference_update(seq.itemsets[k])
        if not missing:
            return k
    return None


def compute_occurrence(seq: Sequence, x: Itemset, y: Itemset) -> RuleOccurrence | None:
    _check_sides(x, y)
    first = _prefix_completion(seq, set(x))
    last = _suffix_completion(seq, set(y))
    if first is None or last is None or first >= last:
        return None
    return RuleOccurrence(first, last)


def contains_items(seq: Sequence, items: Iterable[int]) -> bool:
    """Order-free containment of ``items`` anywhere in ``seq``."""
    return set(items) <= seq.items()


def support_and_confidence(db: SequenceDatabase, x: Itemset, y: Itemset) -> tuple[int, float] | None:
    """Full-scan support and confidence; ``None`` when no sequence contains X."""
    _check_sides(x, y)
    sup_x = sum(1 for seq in db if contains_items(seq, x))
    if sup_x == 0:
        return None
    support = sum(1 for seq in db if rule_occurs(seq, x, y))
    return support, support / sup_x


def is_target_rule(rule: SequentialRule, qr: QueryRule) -> bool:
    return set(qr.antecedent) <= set(rule.antecedent) and set(qr.consequent) <= set(rule.consequent)


def brute_force_mine(db: SequenceDatabase, qr: QueryRule, minsup: int, minconf: float,
                     max_antecedent: int, max_consequent: int) -> set[SequentialRule]:
    """Enumerate every disjoint (X, Y) within the size caps and keep the
    frequent, confident target rules."""
    if max_antecedent < len(qr.antecedent) or max_consequent < len(qr.consequent):
        raise ValueError("size caps must be at least the query side sizes")
    items = sorted(db.items())
    found = set()
    for a in range(1, max_antecedent + 1):
        for x in combinations(items, a):
            rest = [i for i in items if i not in x]
            for b in range(1, max_consequent + 1):
                for y in combinations(rest, b):
                    probe = SequentialRule(x, y, 0, 0.0)
                    if not is_target_rule(probe, qr):
                        continue
                    measured = support_and_confidence(db, x, y)
                    if measured is None:
                        continue
                    support, confidence = measured
                    if support >= minsup and confidence >= minconf:
                        found.add(SequentialRule(x, y, support, confidence))
    return found
