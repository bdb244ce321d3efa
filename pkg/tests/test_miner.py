import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from xmr import (
    Transaction,
    TransactionDatabase,
    Vocabulary,
    mine_frequent,
    mine_frequent_bruteforce,
    support,
)
from xmr.errors import UniverseTooLargeError
from xmr.miner import FrequentItemsetTable, dump_itemsets
from xmr.transactions import ORIGIN_CROSS

from synthdata import db_from_items, random_database

SPEC_DB = [(1, 2, 3), (1, 2), (1, 3), (2, 3), (1, 2, 3)]


def spec_database():
    return db_from_items(SPEC_DB, feature_dim=4)


class TestSupport:
    def test_empty_itemset_is_vacuous(self):
        db = spec_database()
        assert support((), db) == (5, Fraction(1))

    def test_single_item(self):
        db = db_from_items([(1, 2), (2, 3), (1,)], feature_dim=4)
        assert support((1,), db) == (2, Fraction(2, 3))

    def test_absent_item(self):
        db = spec_database()
        count, fraction = support((0,), db)
        assert count == 0 and fraction == 0

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            support((2, 1), spec_database())


class TestMineFrequent:
    def test_spec_example(self):
        table = mine_frequent(spec_database(), 3)
        assert table.as_dict() == {
            (1,): 4, (2,): 4, (3,): 4,
            (1, 2): 3, (1, 3): 3, (2, 3): 3,
        }

    def test_impossible_threshold(self):
        assert len(mine_frequent(spec_database(), 6)) == 0

    def test_max_len_one_keeps_singletons(self):
        table = mine_frequent(spec_database(), 3, max_len=1)
        assert table.as_dict() == {(1,): 4, (2,): 4, (3,): 4}

    def test_empty_database(self):
        db = TransactionDatabase(feature_dim=2, vocabulary=Vocabulary(["w"]))
        assert len(mine_frequent(db, 1)) == 0

    def test_supp_min_validated(self):
        with pytest.raises(ValueError):
            mine_frequent(spec_database(), 0)

    def test_single_path_database(self):
        # Nested transactions force a single-path tree at the top level.
        db = db_from_items([(1, 2, 3), (1, 2), (1,)], feature_dim=4)
        table = mine_frequent(db, 1)
        assert table.as_dict() == mine_frequent_bruteforce(db, 1).as_dict()


class TestBruteforce:
    def test_spec_example(self):
        table = mine_frequent_bruteforce(spec_database(), 3)
        assert table == mine_frequent(spec_database(), 3)

    def test_guard_on_large_universe(self):
        items = tuple(range(25))
        db = db_from_items([items], feature_dim=25)
        with pytest.raises(UniverseTooLargeError):
            mine_frequent_bruteforce(db, 1)

    def test_single_transaction(self):
        db = db_from_items([(7,)], feature_dim=8)
        assert mine_frequent_bruteforce(db, 1).as_dict() == {(7,): 1}


class TestOracleEquivalence:
    @given(st.integers(min_value=0, max_value=10_000),
           st.integers(min_value=1, max_value=5),
           st.sampled_from([None, 1, 2, 3]))
    @settings(max_examples=120, deadline=None)
    def test_fp_growth_matches_bruteforce(self, seed, supp_min, max_len):
        db = random_database(random.Random(seed))
        fast = mine_frequent(db, supp_min, max_len=max_len)
        slow = mine_frequent_bruteforce(db, supp_min, max_len=max_len)
        assert fast.as_dict() == slow.as_dict()
        assert fast.total_transactions == slow.total_transactions


class TestMinedTableProperties:
    def mined(self, seed=99, supp_min=2):
        return mine_frequent(random_database(random.Random(seed), 20, 10), supp_min)

    def test_downward_closure(self):
        table = self.mined()
        assert len(table) > 0
        for itemset in table:
            for size in range(1, len(itemset.items)):
                for subset in combinations(itemset.items, size):
                    assert subset in table
                    assert table.support_of(subset) >= itemset.support_count

    def test_anti_monotonicity(self):
        table = self.mined()
        supports = table.as_dict()
        for items, count in supports.items():
            for other in supports:
                union = tuple(sorted(set(items) | set(other)))
                if union in supports:
                    assert supports[union] <= count

    def test_raising_threshold_shrinks_table(self):
        db = random_database(random.Random(4), 20, 10)
        low = mine_frequent(db, 1).as_dict()
        for supp_min in (2, 3, 4):
            high = mine_frequent(db, supp_min).as_dict()
            assert set(high) <= set(low)
            for items, count in high.items():
                assert low[items] == count
                assert count >= supp_min

    def test_permutation_invariance(self):
        db = random_database(random.Random(11), 16, 9)
        rng = random.Random(5)
        for _ in range(5):
            shuffled = list(db.transactions)
            rng.shuffle(shuffled)
            db2 = TransactionDatabase(
                feature_dim=db.feature_dim,
                vocabulary=db.vocabulary,
                transactions=shuffled,
            )
            assert mine_frequent(db2, 2).as_dict() == mine_frequent(db, 2).as_dict()

    def test_counts_match_direct_support(self):
        db = random_database(random.Random(21), 15, 8)
        table = mine_frequent(db, 2)
        for itemset in table:
            count, _ = support(itemset.items, db)
            assert count == itemset.support_count


def test_dump_itemsets(tmp_path):
    table = mine_frequent(spec_database(), 3)
    path = tmp_path / "itemsets.jsonl"
    dump_itemsets(table, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 6
    assert lines[0] == '{"items": [1], "support": 4}'


def test_table_equality_and_sorting():
    table = FrequentItemsetTable(3)
    table.add((2,), 3)
    table.add((1,), 2)
    table.add((1, 2), 2)
    ordered = [i.items for i in table.sorted_itemsets()]
    assert ordered == [(1,), (2,), (1, 2)]
