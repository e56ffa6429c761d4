import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tasrm.seqdb import (DatasetStats, Sequence, SequenceDatabase, SpmfParseError, build_item_index,
                         dataset_stats, generate_synthetic, parse_spmf, write_spmf)

from conftest import A, B, C, D, E, F, G, EXAMPLE_SPMF, example_db

itemsets = st.lists(st.integers(0, 30), min_size=1, max_size=4)
sequences = st.lists(itemsets, min_size=1, max_size=6)
databases = st.lists(sequences, max_size=8).map(SequenceDatabase.from_lists)


class TestParse:
    def test_single_sequence(self):
        db = parse_spmf("1 -1 3 5 -1 -2")
        assert db.as_lists() == [[[1], [3, 5]]]
        assert db.sequences[0].sid == 0

    def test_two_sequences_get_dense_sids(self):
        db = parse_spmf("2 -1 3 -1 -2\n2 -1 1 -1 4 -1 6 -1 -2")
        assert [s.sid for s in db] == [0, 1]
        assert db.as_lists() == [[[2], [3]], [[2], [1], [4], [6]]]

    def test_metadata_and_comments_skipped(self):
        db = parse_spmf("@CONVERTED_FROM_TEXT\n# comment\n% other\n\n1 -1 -2\n")
        assert db.as_lists() == [[[1]]]

    def test_unsorted_itemsets_normalized(self):
        assert parse_spmf("5 3 3 -1 -2").as_lists() == [[[3, 5]]]

    def test_accepts_stream(self):
        assert len(parse_spmf(io.StringIO(EXAMPLE_SPMF))) == 5

    def test_example_text_matches_fixture(self):
        assert parse_spmf(EXAMPLE_SPMF) == example_db()

    @pytest.mark.parametrize("text, lineno", [
        ("1 -1 -2\n1 x -1 -2", 2),
        ("-1 -2", 1),
        ("-2", 1),
        ("1 -1 2 -1", 1),
        ("1 -1 -2 3", 1),
        ("1 2 -2", 1),
        ("1 -5 -1 -2", 1),
    ])
    def test_errors_carry_line_numbers(self, text, lineno):
        with pytest.raises(SpmfParseError) as err:
            parse_spmf(text)
        assert err.value.lineno == lineno


class TestWrite:
    def test_empty(self):
        assert write_spmf(SequenceDatabase()) == ""

    def test_single(self):
        db = SequenceDatabase.from_lists([[[1], [3, 5]]])
        assert write_spmf(db).splitlines() == ["1 -1 3 5 -1 -2"]

    def test_example_round_trip(self):
        text = write_spmf(example_db())
        assert len(text.splitlines()) == 5
        assert parse_spmf(text) == example_db()

    @given(databases)
    def test_round_trip_property(self, db):
        assert parse_spmf(write_spmf(db)).as_lists() == db.as_lists()


class TestItemIndex:
    def test_item_d(self):
        index = build_item_index(example_db())
        assert sorted(index.positions[D]) == [1, 2, 3, 4]
        assert index.positions[D][3] == (2, 4)

    def test_item_f(self):
        index = build_item_index(example_db())
        assert index.positions[F] == {1: (3, 3)}
        assert index.support(F) == 1

    def test_empty(self):
        assert len(build_item_index(SequenceDatabase())) == 0

    @given(databases)
    def test_agrees_with_rescan(self, db):
        index = build_item_index(db)
        for seq in db:
            for item in seq.items():
                hits = [k for k, itemset in enumerate(seq.itemsets) if item in itemset]
                assert index.positions[item][seq.sid] == (hits[0], hits[-1])
        for item in index.positions:
            assert index.support(item) == sum(1 for seq in db if item in seq.items())


class TestStats:
    def test_example(self):
        stats = dataset_stats(example_db())
        assert stats == DatasetStats(5, 7, 27 / 20, 4.0)
        assert str(stats) == "|D|=5 |I|=7 AVI=1.35 AVL=4.00"

    def test_single(self):
        assert dataset_stats(SequenceDatabase.from_lists([[[1]]])) == DatasetStats(1, 1, 1.0, 1.0)

    def test_empty(self):
        assert dataset_stats(SequenceDatabase()) == DatasetStats(0, 0, 0.0, 0.0)

    @given(databases)
    def test_totals(self, db):
        stats = dataset_stats(db)
        n_sets = sum(len(rows) for rows in db.as_lists())
        n_occ = sum(len(s) for rows in db.as_lists() for s in rows)
        assert stats.num_sequences == len(db.as_lists())
        if n_sets:
            assert stats.avg_items_per_itemset == n_occ / n_sets
            assert stats.avg_itemsets_per_sequence == n_sets / len(db)


class TestGenerator:
    def test_degenerate(self):
        db = generate_synthetic(1, 5, 1, 1, seed=42)
        assert len(db) == 1
        assert len(db.sequences[0].itemsets) == 1
        assert len(db.sequences[0].itemsets[0]) == 1

    def test_deterministic(self):
        assert generate_synthetic(50, 20, 4, 2, seed=3) == generate_synthetic(50, 20, 4, 2, seed=3)
        assert generate_synthetic(50, 20, 4, 2, seed=3) != generate_synthetic(50, 20, 4, 2, seed=4)

    def test_prefix_stable(self):
        small = generate_synthetic(30, 20, 4, 2, seed=9)
        big = generate_synthetic(60, 20, 4, 2, seed=9)
        assert big.sequences[:30] == small.sequences

    def test_means_within_15_percent(self):
        stats = dataset_stats(generate_synthetic(1000, 200, 8, 2, seed=7))
        assert stats.num_sequences == 1000
        assert abs(stats.avg_itemsets_per_sequence - 8) <= 0.15 * 8
        assert abs(stats.avg_items_per_itemset - 2) <= 0.15 * 2

    def test_alphabet_too_small(self):
        with pytest.raises(ValueError):
            generate_synthetic(10, 2, 3, 3, seed=1)

    def test_rejects_zero_parameters(self):
        with pytest.raises(ValueError):
            generate_synthetic(0, 5, 1, 1, seed=1)


class TestModel:
    def test_duplicate_sids_rejected(self):
        with pytest.raises(ValueError):
            SequenceDatabase((Sequence(0, ((1,),)), Sequence(0, ((2,),))))

    def test_empty_itemset_rejected(self):
        with pytest.raises(ValueError):
            Sequence(0, ((),))

    def test_unsorted_itemset_rejected(self):
        with pytest.raises(ValueError):
            Sequence(0, ((2, 1),))

    def test_letters(self):
        assert (A, B, C, D, E, F, G) == (1, 2, 3, 4, 5, 6, 7)
