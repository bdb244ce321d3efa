"""Concept inference: matching rule antecedents against visual transactions.

A rule fires on an image when every antecedent item appears among the
image's items; the consequent word then becomes a concept for that image.
Stream-level inference pools the concepts of a five-image story in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArityError, OriginError
from .ingest import STORY_LENGTH
from .rules import CrossModalRule, RuleStore
from .transactions import ORIGIN_IMAGE, Transaction


@dataclass(frozen=True)
class ConceptSet:
    """Inferred words for one image or one story, with the rules behind them.

    ``concepts`` is deduplicated and ordered by first-inference position
    (the image that produced the word first), ties broken lexically.
    ``support`` maps each word to the rules that fired for it.
    """

    story_id: str
    concepts: tuple[str, ...]
    support: dict[str, tuple[CrossModalRule, ...]] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.support

    def __len__(self) -> int:
        return len(self.concepts)

    def word_set(self) -> set[str]:
        return set(self.concepts)

    def best_confidence(self, word: str) -> Fraction:
        return max(rule.confidence for rule in self.support[word])


def _fired_rules(items: frozenset[int], store: RuleStore) -> list[CrossModalRule]:
    # First-item index prunes most rules; survivors get a full subset check.
    index = store.rules_by_first_item()
    fired = []
    for first in sorted(index):
        if first not in items:
            continue
        for rule in index[first]:
            if all(a in items for a in rule.antecedent):
                fired.append(rule)
    return fired


def infer_image(transaction: Transaction, store: RuleStore) -> ConceptSet:
    """Concepts for a single image transaction."""
    if transaction.origin != ORIGIN_IMAGE:
        raise OriginError(
            f"inference needs an image transaction, got {transaction.origin!r} "
            f"for {transaction.source_id!r}"
        )
    if transaction.items and transaction.items[-1] >= store.feature_dim:
        raise OriginError(
            f"image transaction {transaction.source_id!r} contains word items"
        )
    by_word: dict[str, list[CrossModalRule]] = {}
    for rule in _fired_rules(transaction.item_set(), store):
        by_word.setdefault(store.word_for(rule.consequent), []).append(rule)
    return ConceptSet(
        story_id=transaction.source_id,
        concepts=tuple(sorted(by_word)),
        support={w: tuple(rules) for w, rules in by_word.items()},
    )


def infer_stream(
    story_id: str, transactions: list[Transaction], store: RuleStore
) -> ConceptSet:
    """Concepts pooled over a story's image transactions.

    A word appears once no matter how many images produced it; ordering is
    (index of the first image that fired it, word).
    """
    if len(transactions) != STORY_LENGTH:
        raise ArityError(
            f"story {story_id!r} has {len(transactions)} transactions, "
            f"expected {STORY_LENGTH}"
        )
    per_image = [infer_image(t, store) for t in transactions]
    by_word: dict[str, list[CrossModalRule]] = {}
    first_seen: dict[str, int] = {}
    for position, image_concepts in enumerate(per_image):
        for word in image_concepts.concepts:
            if word not in by_word:
                by_word[word] = []
                first_seen[word] = position
            for rule in image_concepts.support[word]:
                if rule not in by_word[word]:
                    by_word[word].append(rule)
    order = sorted(by_word, key=lambda w: (first_seen[w], w))
    return ConceptSet(
        story_id=story_id,
        concepts=tuple(order),
        support={w: tuple(rules) for w, rules in by_word.items()},
    )


def save_concepts(
    concept_sets: list[ConceptSet], path, with_provenance: bool = True
) -> None:
    """One JSON line per concept set, with per-word rule provenance."""
    with open(path, "w", encoding="utf-8") as fh:
        for cs in concept_sets:
            record = {
                "story_id": cs.story_id,
                "concepts": list(cs.concepts),
            }
            if with_provenance:
                record["provenance"] = {
                    word: [
                        {
                            "antecedent": list(rule.antecedent),
                            "confidence": [rule.support_count,
                                           rule.antecedent_support],
                        }
                        for rule in cs.support[word]
                    ]
                    for word in cs.concepts
                }
            fh.write(json.dumps(record) + "\n")
