"""Frequent-itemset mining: FP-growth plus a brute-force verification oracle.

Supports are exact integer counts; proportions are derived lazily as
rationals.  The FP-growth traversal runs on an explicit work stack so deep
conditional chains cannot exhaust Python's call depth.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import UniverseTooLargeError
from .transactions import TransactionDatabase

BRUTEFORCE_MAX_ITEMS = 24


@dataclass(frozen=True)
class FrequentItemset:
    items: tuple[int, ...]
    support_count: int


class FrequentItemsetTable:
    """Frequent itemsets keyed by their sorted item tuple.

    Tables produced by the miners are downward closed: every non-empty
    subset of a stored itemset is stored too, with support at least the
    superset's.
    """

    def __init__(self, total_transactions: int):
        self.total_transactions = total_transactions
        self._support: dict[tuple[int, ...], int] = {}

    def add(self, items: tuple[int, ...], support_count: int) -> None:
        self._support[items] = support_count

    def get(self, items: Sequence[int]) -> int | None:
        return self._support.get(tuple(items))

    def support_of(self, items: Sequence[int]) -> int:
        return self._support[tuple(items)]

    def __contains__(self, items) -> bool:
        return tuple(items) in self._support

    def __len__(self) -> int:
        return len(self._support)

    def __iter__(self) -> Iterator[FrequentItemset]:
        for items, count in self._support.items():
            yield FrequentItemset(items=items, support_count=count)

    def sorted_itemsets(self) -> list[FrequentItemset]:
        return [
            FrequentItemset(items=items, support_count=self._support[items])
            for items in sorted(self._support, key=lambda it: (len(it), it))
        ]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self._support)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FrequentItemsetTable)
            and self.total_transactions == other.total_transactions
            and self._support == other._support
        )


def support(itemset: Sequence[int], db: TransactionDatabase) -> tuple[int, Fraction]:
    """Count transactions containing every item; also return the exact
    proportion (0 for an empty database)."""
    items = tuple(itemset)
    if any(a >= b for a, b in zip(items, items[1:])):
        raise ValueError("itemset must be sorted ascending")
    wanted = frozenset(items)
    count = sum(1 for t in db.transactions if wanted <= t.item_set())
    m = len(db.transactions)
    return count, (Fraction(count, m) if m else Fraction(0))


class _Node:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item: int | None, parent: "_Node | None"):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict[int, _Node] = {}


def _build_tree(weighted: Iterable[tuple[list[int], int]]):
    """Insert (items-in-header-order, weight) rows into a fresh prefix tree.

    Returns the root and the header table mapping each item to its node
    chain (list order stands in for the classic next-same-item links).
    """
    root = _Node(None, None)
    header: dict[int, list[_Node]] = {}
    for items, weight in weighted:
        node = root
        for item in items:
            child = node.children.get(item)
            if child is None:
                child = _Node(item, node)
                node.children[item] = child
                header.setdefault(item, []).append(child)
            child.count += weight
            node = child
    return root, header


def _single_path(root: _Node) -> list[tuple[int, int]] | None:
    """Return the (item, count) chain when the tree is one path, else None."""
    path = []
    node = root
    while node.children:
        if len(node.children) > 1:
            return None
        node = next(iter(node.children.values()))
        path.append((node.item, node.count))
    return path


def mine_frequent(
    db: TransactionDatabase, supp_min: int, max_len: int | None = None
) -> FrequentItemsetTable:
    """FP-growth over the database.

    Emits exactly the itemsets whose support count reaches ``supp_min``
    (and whose size stays within ``max_len`` when given), each with its
    exact count.  Header order is descending global frequency with
    ascending-id tie-break; conditional pattern bases are processed from
    an explicit stack.
    """
    if supp_min < 1:
        raise ValueError("supp_min must be >= 1")
    if max_len is not None and max_len < 1:
        raise ValueError("max_len must be >= 1 when set")
    table = FrequentItemsetTable(len(db.transactions))
    # Work items are (weighted rows of the conditional base, suffix mined so far).
    work: list[tuple[list[tuple[list[int], int]], tuple[int, ...]]] = [
        ([(list(t.items), 1) for t in db.transactions], ())
    ]

    while work:
        weighted, suffix = work.pop()
        counts: Counter[int] = Counter()
        for items, weight in weighted:
            for item in items:
                counts[item] += weight
        frequent = {i: c for i, c in counts.items() if c >= supp_min}
        if not frequent:
            continue
        budget = None if max_len is None else max_len - len(suffix)
        if budget is not None and budget <= 0:
            continue
        rank = {
            item: pos
            for pos, item in enumerate(
                sorted(frequent, key=lambda i: (-frequent[i], i))
            )
        }
        filtered = []
        for items, weight in weighted:
            kept = sorted((i for i in items if i in frequent), key=rank.__getitem__)
            if kept:
                filtered.append((kept, weight))
        root, header = _build_tree(filtered)

        chain = _single_path(root)
        if chain is not None:
            # Counts along a single path are non-increasing, so any
            # combination's support is the count of its deepest node.
            top = len(chain) if budget is None else min(budget, len(chain))
            for size in range(1, top + 1):
                for combo in combinations(range(len(chain)), size):
                    items = tuple(sorted(
                        [chain[i][0] for i in combo] + list(suffix)
                    ))
                    table.add(items, chain[combo[-1]][1])
            continue

        for item in header:
            nodes = header[item]
            item_support = sum(n.count for n in nodes)
            new_suffix = suffix + (item,)
            table.add(tuple(sorted(new_suffix)), item_support)
            if budget is not None and budget == 1:
                continue
            conditional = []
            for n in nodes:
                path = []
                p = n.parent
                while p.item is not None:
                    path.append(p.item)
                    p = p.parent
                if path:
                    path.reverse()
                    conditional.append((path, n.count))
            if conditional:
                work.append((conditional, new_suffix))
    return table


def mine_frequent_bruteforce(
    db: TransactionDatabase, supp_min: int, max_len: int | None = None
) -> FrequentItemsetTable:
    """Exhaustive oracle: enumerate every candidate itemset over the observed
    items and count its support directly.

    Guarded to universes of at most 24 distinct items; beyond that the
    power set is not enumerable in reasonable time.
    """
    if supp_min < 1:
        raise ValueError("supp_min must be >= 1")
    universe = sorted({i for t in db.transactions for i in t.items})
    if len(universe) > BRUTEFORCE_MAX_ITEMS:
        raise UniverseTooLargeError(
            f"{len(universe)} distinct items exceed the brute-force cap of "
            f"{BRUTEFORCE_MAX_ITEMS}"
        )
    position = {item: p for p, item in enumerate(universe)}
    masks = [
        sum(1 << position[i] for i in t.items) for t in db.transactions
    ]
    table = FrequentItemsetTable(len(db.transactions))
    for candidate in range(1, 1 << len(universe)):
        if max_len is not None and candidate.bit_count() > max_len:
            continue
        count = sum(1 for m in masks if candidate & m == candidate)
        if count >= supp_min:
            items = tuple(
                universe[p] for p in range(len(universe)) if candidate >> p & 1
            )
            table.add(items, count)
    return table


def dump_itemsets(table: FrequentItemsetTable, path) -> None:
    """Debug dump, one ``{"items": [...], "support": n}`` object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for itemset in table.sorted_itemsets():
            fh.write(
                json.dumps({"items": list(itemset.items), "support": itemset.support_count})
                + "\n"
            )
