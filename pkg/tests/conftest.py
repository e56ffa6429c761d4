import random

import pytest

from tasrm.rulecore import QueryRule
from tasrm.seqdb import SequenceDatabase

# letters of the worked example mapped to item ids
A, B, C, D, E, F, G = range(1, 8)

EXAMPLE_ROWS = [
    [[B], [C, E]],
    [[B], [A], [D], [F]],
    [[B, C], [D], [A], [G], [B, C]],
    [[B], [A], [D], [E], [C, D]],
    [[C, D], [A, B], [E, G], [C]],
]

EXAMPLE_SPMF = """\
2 -1 3 5 -1 -2
2 -1 1 -1 4 -1 6 -1 -2
2 3 -1 4 -1 1 -1 7 -1 2 3 -1 -2
2 -1 1 -1 4 -1 5 -1 3 4 -1 -2
3 4 -1 1 2 -1 5 7 -1 3 -1 -2
"""

# (antecedent, consequent, support, confidence) for query {a,b} -> {c}
EXAMPLE_TARGETS = {
    ((A, B), (C,), 3, 0.75),
    ((A, B, D), (C,), 3, 0.75),
    ((A, B, D, E), (C,), 2, 1.0),
    ((A, B, D, G), (C,), 2, 1.0),
    ((A, B, E), (C,), 2, 1.0),
    ((A, B, G), (C,), 2, 1.0),
}


def example_db() -> SequenceDatabase:
    return SequenceDatabase.from_lists(EXAMPLE_ROWS)


@pytest.fixture
def db1():
    return example_db()


@pytest.fixture
def qr_abc():
    return QueryRule((A, B), (C,))


def as_tuples(rules):
    return {(r.antecedent, r.consequent, r.support, r.confidence) for r in rules}


def random_db(rng: random.Random, max_sequences=8, max_items=6, max_itemsets=5, max_itemset_size=3):
    n_items = rng.randint(1, max_items)
    rows = []
    for _ in range(rng.randint(1, max_sequences)):
        rows.append([rng.sample(range(1, n_items + 1), rng.randint(1, min(max_itemset_size, n_items)))
                     for _ in range(rng.randint(1, max_itemsets))])
    return SequenceDatabase.from_lists(rows)


def random_query(rng: random.Random, items, kind=None) -> QueryRule:
    """``kind`` is one of empty / antecedent / consequent / both."""
    kind = kind or rng.choice(["empty", "antecedent", "consequent", "both"])
    pool = sorted(items)
    rng.shuffle(pool)
    if kind == "empty" or not pool:
        return QueryRule()
    n_x = rng.randint(1, min(2, len(pool))) if kind in ("antecedent", "both") else 0
    rest = pool[n_x:]
    n_y = rng.randint(1, min(2, len(rest))) if kind in ("consequent", "both") and rest else 0
    return QueryRule(tuple(pool[:n_x]), tuple(rest[:n_y]))


# --- acceptance reporting: one PASS/FAIL line per criterion ----------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "ran": 0})
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] or not entry["ran"] else "PASS"
        line = f"criterion {number}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failed: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
