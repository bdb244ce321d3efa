"""Vision-to-word rule generation, storage, merging, and serialization.

A rule's antecedent is a purely visual itemset (every item below the
feature dimension) and its consequent a single word item.  Confidence is
kept as an exact rational of stored counts, so threshold checks reduce to
integer cross-multiplication.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import (
    ClosureViolationError,
    DomainError,
    FormatVersionError,
    IncompatibleStoreError,
    InvariantViolationError,
    ParseError,
    RemapRequiredError,
)
from .ingest import Vocabulary
from .miner import FrequentItemsetTable

FORMAT_NAME = "xmr-rules"
FORMAT_VERSION = 1

RuleKey = tuple[tuple[int, ...], int]


def confidence(joint_support: int, antecedent_support: int) -> Fraction:
    """Exact rule confidence ``joint / antecedent``."""
    if antecedent_support == 0:
        raise DomainError("antecedent support is zero")
    if not 0 < joint_support <= antecedent_support:
        raise DomainError(
            f"joint support {joint_support} must lie in (0, {antecedent_support}]"
        )
    return Fraction(joint_support, antecedent_support)


@dataclass(frozen=True)
class CrossModalRule:
    antecedent: tuple[int, ...]
    consequent: int
    support_count: int
    antecedent_support: int

    @property
    def confidence(self) -> Fraction:
        return Fraction(self.support_count, self.antecedent_support)

    def key(self) -> RuleKey:
        return (self.antecedent, self.consequent)


@dataclass(frozen=True)
class Provenance:
    tag: str
    joint: int
    ante: int


class RuleStore:
    """Rules keyed by (antecedent, consequent) with per-rule provenance.

    ``words`` maps consequent item ids to their word strings; stores built
    from a vocabulary carry the full mapping, stores loaded from disk only
    the words their rules mention.
    """

    def __init__(self, feature_dim: int, vocab_size: int, words: dict[int, str]):
        if feature_dim < 1:
            raise ValueError("feature_dim must be >= 1")
        self.feature_dim = feature_dim
        self.vocab_size = vocab_size
        self.words = dict(words)
        self._rules: dict[RuleKey, CrossModalRule] = {}
        self._provenance: dict[RuleKey, list[Provenance]] = {}
        self._by_first: dict[int, list[CrossModalRule]] | None = None

    @classmethod
    def for_vocabulary(cls, feature_dim: int, vocab: Vocabulary) -> "RuleStore":
        words = {
            feature_dim + idx: word
            for idx, word in enumerate(vocab.words)
            if idx != vocab.unk_index
        }
        return cls(feature_dim, vocab.size, words)

    def __len__(self) -> int:
        return len(self._rules)

    def __iter__(self) -> Iterator[CrossModalRule]:
        return iter(self._rules.values())

    def __contains__(self, key: RuleKey) -> bool:
        return key in self._rules

    def get(self, key: RuleKey) -> CrossModalRule | None:
        return self._rules.get(key)

    def keys(self) -> set[RuleKey]:
        return set(self._rules)

    def provenance(self, key: RuleKey) -> list[Provenance]:
        return list(self._provenance[key])

    def word_for(self, consequent: int) -> str:
        return self.words[consequent]

    def add(self, rule: CrossModalRule, provenance: list[Provenance]) -> None:
        self._validate(rule)
        key = rule.key()
        if key in self._rules:
            raise InvariantViolationError(f"duplicate rule key {key}")
        self._rules[key] = rule
        self._provenance[key] = list(provenance)
        self._by_first = None

    def _validate(self, rule: CrossModalRule) -> None:
        if not rule.antecedent:
            raise InvariantViolationError("rule antecedent is empty")
        if any(a >= b for a, b in zip(rule.antecedent, rule.antecedent[1:])):
            raise InvariantViolationError("antecedent must be strictly ascending")
        if rule.antecedent[-1] >= self.feature_dim:
            raise InvariantViolationError(
                f"antecedent item {rule.antecedent[-1]} is not a visual item "
                f"(feature_dim {self.feature_dim})"
            )
        if not self.feature_dim <= rule.consequent < self.feature_dim + self.vocab_size:
            raise InvariantViolationError(
                f"consequent {rule.consequent} is not a word item "
                f"(expected [{self.feature_dim}, {self.feature_dim + self.vocab_size}))"
            )
        if not 0 < rule.support_count <= rule.antecedent_support:
            raise InvariantViolationError(
                f"support {rule.support_count} must lie in (0, {rule.antecedent_support}]"
            )

    def rules_by_first_item(self) -> dict[int, list[CrossModalRule]]:
        """Index rules by their smallest antecedent item (for inference)."""
        if self._by_first is None:
            index: dict[int, list[CrossModalRule]] = {}
            for key in sorted(self._rules):
                rule = self._rules[key]
                index.setdefault(rule.antecedent[0], []).append(rule)
            self._by_first = index
        return self._by_first

    def sorted_rules(self) -> list[CrossModalRule]:
        return [self._rules[key] for key in sorted(self._rules)]


def _passes(value: Fraction, threshold: Fraction, strict: bool) -> bool:
    return value > threshold if strict else value >= threshold


def generate_rules(
    freq: FrequentItemsetTable,
    conf_min,
    feature_dim: int,
    supp_min: int,
    vocab: Vocabulary,
    tag: str = "",
    strict: bool = False,
    threads: int = 1,
) -> RuleStore:
    """Turn frequent itemsets into vision-to-word rules.

    Every itemset with exactly one word item and at least two items yields a
    candidate rule (visual part => word item); it is kept when its joint
    support and confidence clear the thresholds.  Itemsets with zero or
    several word items emit nothing, so text-to-text rules are never even
    enumerated.  ``strict`` switches the >= comparisons to >.
    """
    conf_min = Fraction(str(conf_min)) if isinstance(conf_min, float) else Fraction(conf_min)
    store = RuleStore.for_vocabulary(feature_dim, vocab)
    candidates = [
        itemset
        for itemset in freq.sorted_itemsets()
        if len(itemset.items) >= 2
        and sum(1 for i in itemset.items if i >= feature_dim) == 1
    ]

    def build(itemset) -> CrossModalRule | None:
        consequent = itemset.items[-1]
        antecedent = itemset.items[:-1]
        if antecedent[-1] >= feature_dim:
            # more than the final item is textual; filtered out above
            raise AssertionError("candidate filter admitted a non-visual antecedent")
        ante_support = freq.get(antecedent)
        if ante_support is None:
            raise ClosureViolationError(
                f"antecedent {list(antecedent)} missing from the frequent-itemset "
                f"table; downward closure violated"
            )
        joint = itemset.support_count
        if not _passes(Fraction(joint), Fraction(supp_min), strict):
            return None
        if not _passes(confidence(joint, ante_support), conf_min, strict):
            return None
        return CrossModalRule(
            antecedent=antecedent,
            consequent=consequent,
            support_count=joint,
            antecedent_support=ante_support,
        )

    if threads > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            built = list(pool.map(build, candidates))
    else:
        built = [build(c) for c in candidates]
    for rule in built:
        if rule is not None:
            store.add(rule, [Provenance(tag=tag, joint=rule.support_count,
                                        ante=rule.antecedent_support)])
    return store


def merge_stores(a: RuleStore, b: RuleStore) -> RuleStore:
    """Union two stores; colliding keys keep the higher-confidence entry
    (larger joint support on ties) and concatenate provenance."""
    if a.feature_dim != b.feature_dim:
        raise IncompatibleStoreError(
            f"feature dimensions differ ({a.feature_dim} vs {b.feature_dim})"
        )
    if a.vocab_size != b.vocab_size:
        raise RemapRequiredError(
            f"vocabulary sizes differ ({a.vocab_size} vs {b.vocab_size}); "
            f"remap one store to the other's vocabulary first"
        )
    for item in a.words.keys() & b.words.keys():
        if a.words[item] != b.words[item]:
            raise RemapRequiredError(
                f"item {item} names {a.words[item]!r} in one store and "
                f"{b.words[item]!r} in the other; remap before merging"
            )
    merged = RuleStore(a.feature_dim, a.vocab_size, {**a.words, **b.words})
    for key in a.keys() | b.keys():
        ra, rb = a.get(key), b.get(key)
        if ra is not None and rb is not None:
            pick = max(ra, rb, key=lambda r: (r.confidence, r.support_count))
            merged.add(pick, a.provenance(key) + b.provenance(key))
        elif ra is not None:
            merged.add(ra, a.provenance(key))
        else:
            merged.add(rb, b.provenance(key))
    return merged


def save_store(store: RuleStore, path) -> None:
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "feature_dim": store.feature_dim,
        "vocab_size": store.vocab_size,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for rule in store.sorted_rules():
            fh.write(json.dumps({
                "antecedent": list(rule.antecedent),
                "consequent": rule.consequent,
                "word": store.words.get(rule.consequent, ""),
                "joint": rule.support_count,
                "ante": rule.antecedent_support,
                "provenance": [
                    {"tag": p.tag, "joint": p.joint, "ante": p.ante}
                    for p in store.provenance(rule.key())
                ],
            }) + "\n")


def load_store(path) -> RuleStore:
    """Lossless counterpart of :func:`save_store`.

    Parse failures report the byte offset of the offending line; loaded
    rules are re-validated against the store invariants.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    offset = 0
    lines = data.split(b"\n")
    header_raw = lines[0] if lines else b""
    try:
        header = json.loads(header_raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(path, f"bad header: {exc}", byte_offset=0) from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise FormatVersionError(
            f"{path}: not a {FORMAT_NAME} file (format {header.get('format') if isinstance(header, dict) else header!r})"
        )
    if header.get("version") != FORMAT_VERSION:
        raise FormatVersionError(
            f"{path}: unsupported version {header.get('version')}, "
            f"this build reads version {FORMAT_VERSION}"
        )
    store = RuleStore(header["feature_dim"], header["vocab_size"], {})
    offset = len(lines[0]) + 1
    for raw in lines[1:]:
        if not raw.strip():
            offset += len(raw) + 1
            continue
        try:
            record = json.loads(raw.decode("utf-8"))
            antecedent = tuple(record["antecedent"])
            rule = CrossModalRule(
                antecedent=antecedent,
                consequent=record["consequent"],
                support_count=record["joint"],
                antecedent_support=record["ante"],
            )
            provenance = [
                Provenance(tag=p["tag"], joint=p["joint"], ante=p["ante"])
                for p in record["provenance"]
            ]
            word = record["word"]
        except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError) as exc:
            raise ParseError(path, str(exc), byte_offset=offset) from exc
        if word:
            known = store.words.get(rule.consequent)
            if known is not None and known != word:
                raise InvariantViolationError(
                    f"{path}: item {rule.consequent} has conflicting words "
                    f"{known!r} and {word!r}"
                )
            store.words[rule.consequent] = word
        store.add(rule, provenance)
        offset += len(raw) + 1
    return store
