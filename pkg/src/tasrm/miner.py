"""Rule-growth engine for targeted sequential rule mining.

Rules grow from 1*1 seeds. Right expansion adds to the consequent an item
larger than every consequent item, left expansion does the same for the
antecedent, and a rule that was left-expanded is never right-expanded again.
This gives every rule exactly one derivation.

Four variants share the engine and differ only in how much pruning they do:

========  ===========================================================
baseline  plain rule growth on the whole database, then post-filter
v1        transaction filtering, growth, post-filter
v2        v1 + item filtering + seed admission, growth, post-filter
v3        v2 + count maps, scan windows and match tracking; only target
          rules are ever emitted
========  ===========================================================

All variants return the same rules with the same support and confidence.
"""

from __future__ import annotations

import enum
import time
import tracemalloc
from dataclasses import dataclass, field, replace
from typing import Mapping

from .pruning import (LEFT, RIGHT, CountMaps, MatchState, TMPMEntry, advance_match, build_count_maps,
                      build_tmpm, uip_filter, ueip_item_admissible, urp_admits,
                      utp_filter)
from .rulecore import QueryRule, SequentialRule, is_target_rule
from .seqdb import SequenceDatabase, build_item_index


class Variant(str, enum.Enum):
    BASELINE = "baseline"
    V1 = "v1"
    V2 = "v2"
    V3 = "v3"


ALL_VARIANTS = (Variant.BASELINE, Variant.V1, Variant.V2, Variant.V3)


@dataclass(frozen=True)
class MinerConfig:
    minsup: int
    minconf: float
    variant: Variant = Variant.V3
    max_antecedent: int | None = None
    max_consequent: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if isinstance(self.minsup, bool) or not isinstance(self.minsup, int) or self.minsup < 1:
            raise ValueError(f"minsup must be an integer >= 1, got {self.minsup!r}")
        if not 0 < self.minconf <= 1:
            raise ValueError(f"minconf must be in (0, 1], got {self.minconf!r}")
        for cap in (self.max_antecedent, self.max_consequent):
            if cap is not None and cap < 1:
                raise ValueError("size caps must be >= 1")


@dataclass
class MiningStats:
    expansions_left: int = 0
    expansions_right: int = 0
    seed_pairs_evaluated: int = 0
    rules_emitted: int = 0
    filtering_rate: float = 0.0
    elapsed_seconds: float = 0.0
    peak_memory_bytes: int | None = None

    @property
    def expansions(self) -> int:
        return self.expansions_left + self.expansions_right


@dataclass
class MiningResult:
    rules: list[SequentialRule]
    stats: MiningStats


@dataclass(frozen=True)
class RuleState:
    """A rule during growth. ``occurrences`` maps each supporting sid to its
    ``(first_itemset, last_itemset)`` pair."""

    antecedent: tuple[int, ...]
    consequent: tuple[int, ...]
    occurrences: Mapping[int, tuple[int, int]]
    sids_antecedent: frozenset[int]
    match: MatchState = MatchState()

    @property
    def support(self) -> int:
        return len(self.occurrences)

    @property
    def confidence(self) -> float:
        return self.support / len(self.sids_antecedent)

    def to_rule(self) -> SequentialRule:
        return SequentialRule(self.antecedent, self.consequent, self.support, self.confidence)


@dataclass
class GrowthContext:
    """The database a variant grows rules on, plus its pruning structures.

    ``tmpm`` enables the per-sequence scan windows; ``count_maps`` and
    ``track_match`` enable the expansion bounds; ``use_urp`` enables seed
    admission.
    """

    db: SequenceDatabase
    qr: QueryRule
    config: MinerConfig
    tmpm: Mapping[int, TMPMEntry] | None = None
    count_maps: CountMaps | None = None
    use_urp: bool = False
    track_match: bool = False
    stats: MiningStats = field(default_factory=MiningStats)

    def __post_init__(self) -> None:
        index = build_item_index(self.db)
        self.frequent = index.frequent_items(self.config.minsup)
        keep = frozenset(self.frequent)
        # only frequent items can appear in a frequent rule; empty itemsets keep positions stable
        self.rows = {seq.sid: [keep.intersection(itemset) for itemset in seq.itemsets] for seq in self.db}
        self.positions: dict[int, dict[int, tuple[int, int]]] = {sid: {} for sid in self.rows}
        for item, per_sid in index.positions.items():
            for sid, span in per_sid.items():
                self.positions[sid][item] = span
        self.item_sids = {item: frozenset(per_sid) for item, per_sid in index.positions.items()}

    # -- seeds ---------------------------------------------------------------

    def seed_rules(self) -> list[RuleState]:
        qr, minsup = self.qr, self.config.minsup
        seeds = []
        frequent = self.frequent
        for i, m in enumerate(frequent):
            if self.use_urp and qr.first_left is not None and m > qr.first_left:
                break  # every later pair has both candidate antecedents > first_left
            for n in frequent[i + 1:]:
                self.stats.seed_pairs_evaluated += 1
                if self.use_urp:
                    fwd, bwd = urp_admits(m, n, qr, self.count_maps, minsup)
                else:
                    fwd = bwd = True
                if not (fwd or bwd):
                    continue
                common = self.item_sids[m] & self.item_sids[n]
                if len(common) < minsup:
                    continue
                occ_mn: dict[int, tuple[int, int]] = {}
                occ_nm: dict[int, tuple[int, int]] = {}
                for sid in common:
                    pos = self.positions[sid]
                    first_m, last_m = pos[m]
                    first_n, last_n = pos[n]
                    if fwd and first_m < last_n:
                        occ_mn[sid] = (first_m, last_n)
                    if bwd and first_n < last_m:
                        occ_nm[sid] = (first_n, last_m)
                if len(occ_mn) >= minsup:
                    seeds.append(self._seed(m, n, occ_mn))
                if len(occ_nm) >= minsup:
                    seeds.append(self._seed(n, m, occ_nm))
        return seeds

    def _seed(self, left: int, right: int, occ: dict[int, tuple[int, int]]) -> RuleState:
        match = MatchState()
        if self.track_match:
            match = advance_match(advance_match(match, LEFT, left, self.qr), RIGHT, right, self.qr)
        return RuleState((left,), (right,), occ, self.item_sids[left], match)

    # -- expansions ----------------------------------------------------------

    def _admissible(self, side: str, match: MatchState):
        """Per-expansion item filter, or ``None`` when nothing is filtered."""
        if not self.track_match:
            return None
        qr, cm, minsup = self.qr, self.count_maps, self.config.minsup
        cache: dict[int, bool] = {}

        def check(e: int) -> bool:
            ok = cache.get(e)
            if ok is None:
                ok = cache[e] = ueip_item_admissible(e, side, match, qr, cm, minsup)
            return ok

        return check

    def collect_right(self, state: RuleState) -> dict[int, dict[int, tuple[int, int]]]:
        """Candidate table: item -> {sid: occurrence of I -> J u {item}}."""
        max_j = state.consequent[-1]
        antecedent = set(state.antecedent)
        admissible = self._admissible(RIGHT, state.match)
        table: dict[int, dict[int, tuple[int, int]]] = {}
        for sid, (first, last) in state.occurrences.items():
            start = first
            if self.tmpm is not None:
                start = max(first, self.tmpm[sid].left_end)
            itemsets = self.rows[sid]
            if start + 1 >= len(itemsets):
                continue
            pos = self.positions[sid]
            for e in set().union(*itemsets[start + 1:]):
                if e <= max_j or e in antecedent or (admissible is not None and not admissible(e)):
                    continue
                per_sid = table.get(e)
                if per_sid is None:
                    per_sid = table[e] = {}
                e_last = pos[e][1]
                per_sid[sid] = (first, e_last if e_last < last else last)
        return table

    def collect_left(self, state: RuleState) -> dict[int, dict[int, tuple[int, int]]]:
        """Candidate table: item -> {sid: occurrence of I u {item} -> J}."""
        max_i = state.antecedent[-1]
        consequent = set(state.consequent)
        admissible = self._admissible(LEFT, state.match)
        table: dict[int, dict[int, tuple[int, int]]] = {}
        for sid, (first, last) in state.occurrences.items():
            end = last
            if self.tmpm is not None:
                end = min(last, self.tmpm[sid].right_end)
            if end < 1:
                continue
            pos = self.positions[sid]
            for e in set().union(*self.rows[sid][:end]):
                if e <= max_i or e in consequent or (admissible is not None and not admissible(e)):
                    continue
                per_sid = table.get(e)
                if per_sid is None:
                    per_sid = table[e] = {}
                e_first = pos[e][0]
                per_sid[sid] = (e_first if e_first > first else first, last)
        return table

    def expand_right(self, state: RuleState) -> list[RuleState]:
        self.stats.expansions_right += 1
        children = []
        for e, occ in sorted(self.collect_right(state).items()):
            if len(occ) < self.config.minsup:
                continue
            match = advance_match(state.match, RIGHT, e, self.qr) if self.track_match else state.match
            children.append(RuleState(state.antecedent, state.consequent + (e,), occ,
                                      state.sids_antecedent, match))
        return children

    def expand_left(self, state: RuleState) -> list[RuleState]:
        self.stats.expansions_left += 1
        children = []
        for e, occ in sorted(self.collect_left(state).items()):
            if len(occ) < self.config.minsup:
                continue
            match = advance_match(state.match, LEFT, e, self.qr) if self.track_match else state.match
            children.append(RuleState(state.antecedent + (e,), state.consequent, occ,
                                      state.sids_antecedent & self.item_sids[e], match))
        return children

    # -- driver --------------------------------------------------------------

    def _can_grow(self, state: RuleState, side: str) -> bool:
        cfg = self.config
        if side == RIGHT:
            return cfg.max_consequent is None or len(state.consequent) < cfg.max_consequent
        if cfg.max_antecedent is not None and len(state.antecedent) >= cfg.max_antecedent:
            return False
        # a left-expanded rule can no longer gain consequent items
        return not self.track_match or state.match.y_complete(self.qr)

    def run(self) -> list[SequentialRule]:
        cfg = self.config
        if cfg.max_antecedent is not None and cfg.max_antecedent < len(self.qr.antecedent):
            return []
        if cfg.max_consequent is not None and cfg.max_consequent < len(self.qr.consequent):
            return []
        out: list[SequentialRule] = []
        # explicit stack: long rules must not hit the interpreter recursion limit
        stack: list[tuple[str, RuleState]] = []

        def visit(state: RuleState, right_allowed: bool) -> None:
            if (not self.track_match or state.match.complete(self.qr)) and state.confidence >= cfg.minconf:
                out.append(state.to_rule())
            if self._can_grow(state, LEFT):
                stack.append((LEFT, state))
            if right_allowed and self._can_grow(state, RIGHT):
                stack.append((RIGHT, state))

        for seed in self.seed_rules():
            visit(seed, True)
        while stack:
            side, state = stack.pop()
            if side == RIGHT:
                for child in self.expand_right(state):
                    visit(child, True)
            else:
                for child in self.expand_left(state):
                    visit(child, False)
        return out


def post_filter(rules: list[SequentialRule], qr: QueryRule) -> list[SequentialRule]:
    return [rule for rule in rules if is_target_rule(rule, qr)]


def prepare(db: SequenceDatabase, qr: QueryRule, config: MinerConfig) -> GrowthContext:
    """Apply the variant's database-level pruning and return the context the
    growth phase runs in."""
    variant = config.variant
    if variant is Variant.BASELINE:
        return GrowthContext(db, qr, config)
    filtered, rate = utp_filter(db, qr)
    if variant is Variant.V1:
        return GrowthContext(filtered, qr, config, stats=MiningStats(filtering_rate=rate))
    tmpm = build_tmpm(filtered, qr)
    v3 = variant is Variant.V3
    reduced, tmpm = uip_filter(filtered, tmpm, qr, config.minsup, use_count_maps=v3)
    stats = MiningStats(filtering_rate=rate)
    if not v3:
        return GrowthContext(reduced, qr, config, use_urp=True, stats=stats)
    count_maps = build_count_maps(reduced, tmpm, qr, config.minsup)
    return GrowthContext(reduced, qr, config, tmpm=tmpm, count_maps=count_maps,
                         use_urp=True, track_match=True, stats=stats)


def mine(db: SequenceDatabase, qr: QueryRule, config: MinerConfig, *,
         track_memory: bool = False) -> MiningResult:
    """Return every rule X -> Y with the query antecedent in X, the query
    consequent in Y, support >= minsup and confidence >= minconf."""
    if not isinstance(qr, QueryRule):
        raise TypeError("qr must be a QueryRule")
    if track_memory:
        tracemalloc.start()
    started = time.perf_counter()
    try:
        ctx = prepare(db, qr, config)
        rules = ctx.run()
        if config.variant is not Variant.V3:
            rules = post_filter(rules, qr)
        rules.sort(key=SequentialRule.sort_key)
        stats = ctx.stats
        stats.rules_emitted = len(rules)
        stats.elapsed_seconds = time.perf_counter() - started
        if track_memory:
            stats.peak_memory_bytes = tracemalloc.get_traced_memory()[1]
    finally:
        if track_memory:
            tracemalloc.stop()
    return MiningResult(rules, stats)


def mine_baseline_all(db: SequenceDatabase, config: MinerConfig) -> list[SequentialRule]:
    """Every frequent, confident rule (no query)."""
    return mine(db, QueryRule(), replace(config, variant=Variant.BASELINE)).rules


def seed_rules(db: SequenceDatabase, qr: QueryRule, config: MinerConfig) -> list[RuleState]:
    """The admissible 1*1 seeds of ``config.variant`` on ``db``."""
    return prepare(db, qr, config).seed_rules()
