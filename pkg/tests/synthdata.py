"""Synthetic datasets with closed-form ground truth.

The planted-rule construction keeps every plant disjoint: transactions for
plant i contain only its visual item p_i (and possibly its word item), so
the complete frequent-itemset structure, the exact rule set at any
threshold pair, and the per-stream metrics are all computable by plain
counting, independent of the mining code under test.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from xmr import (
    EvalStream,
    MiningParams,
    Transaction,
    TransactionDatabase,
    Vocabulary,
)
from xmr.transactions import ORIGIN_CROSS, ORIGIN_IMAGE


@dataclass(frozen=True)
class Plant:
    visual_item: int
    word: str
    word_item: int
    joint: int       # transactions containing both items
    antecedent: int  # transactions containing the visual item

    @property
    def confidence(self) -> Fraction:
        return Fraction(self.joint, self.antecedent)


@dataclass
class PlantedSet:
    feature_dim: int
    vocab: Vocabulary
    db: TransactionDatabase
    plants: list[Plant]
    filler_items: list[int]

    def expected_rules(
        self, supp_min: int, conf_min, strict: bool = False
    ) -> dict[tuple[tuple[int, ...], int], Fraction]:
        """The exact rule set any correct pipeline must produce."""
        conf_min = Fraction(conf_min) if not isinstance(conf_min, Fraction) else conf_min
        keep = {}
        for p in self.plants:
            supp_ok = p.joint > supp_min if strict else p.joint >= supp_min
            conf_ok = p.confidence > conf_min if strict else p.confidence >= conf_min
            if supp_ok and conf_ok:
                keep[((p.visual_item,), p.word_item)] = p.confidence
        return keep

    def surviving_words(self, supp_min: int, conf_min, strict: bool = False) -> set[str]:
        survivors = self.expected_rules(supp_min, conf_min, strict)
        by_item = {p.word_item: p.word for p in self.plants}
        return {by_item[consequent] for (_, consequent) in survivors}


def make_planted_db(
    seed: int = 0,
    n_plants: int = 20,
    total_transactions: int = 500,
    feature_dim: int = 64,
) -> PlantedSet:
    """Disjoint planted rules inside a cross-modal transaction database.

    Plant i occupies its own transactions: ``joint`` copies of
    {p_i, word_item_i} and ``antecedent - joint`` copies of {p_i}.  The
    remainder up to ``total_transactions`` is filler singletons {q}, one
    transaction each, on visual items no plant uses.
    """
    rng = random.Random(seed)
    words = [f"w{idx:02d}" for idx in range(n_plants)]
    vocab = Vocabulary(sorted(words))
    plants = []
    transactions = []
    for idx in range(n_plants):
        antecedent = rng.randint(8, 20)
        joint = rng.randint(3, antecedent)
        visual = idx
        word = words[idx]
        word_item = feature_dim + vocab.lookup(word)
        plants.append(Plant(
            visual_item=visual, word=word, word_item=word_item,
            joint=joint, antecedent=antecedent,
        ))
        for copy in range(antecedent):
            items = (visual, word_item) if copy < joint else (visual,)
            transactions.append(Transaction(
                items=items, origin=ORIGIN_CROSS, source_id=f"plant{idx}-{copy}"
            ))
    # Fillers are pure-visual singletons on unplanted dims; reusing dims
    # only raises singleton supports and can never form a rule.
    available = list(range(n_plants, feature_dim))
    filler_items = []
    for n in range(total_transactions - len(transactions)):
        q = available[n % len(available)]
        if q not in filler_items:
            filler_items.append(q)
        transactions.append(Transaction(
            items=(q,), origin=ORIGIN_CROSS, source_id=f"filler{n}"
        ))
    rng.shuffle(transactions)
    db = TransactionDatabase(
        feature_dim=feature_dim, vocabulary=vocab, transactions=transactions
    )
    return PlantedSet(
        feature_dim=feature_dim, vocab=vocab, db=db,
        plants=plants, filler_items=filler_items,
    )


def make_planted_streams(
    planted: PlantedSet, seed: int = 0, n_streams: int = 12
) -> list[EvalStream]:
    """Evaluation streams over the planted items.

    Every image transaction holds a subset of planted visual items, so the
    exact concept set at any threshold pair follows from ``expected_rules``
    plus plain set algebra; references are plant words, some of them for
    plants the stream never shows (never inferable, depressing recall).
    """
    rng = random.Random(seed)
    streams = []
    for s in range(n_streams):
        shown: list[list[Plant]] = []
        for _ in range(5):
            shown.append(rng.sample(planted.plants, rng.randint(0, 3)))
        transactions = tuple(
            Transaction(
                items=tuple(sorted({p.visual_item for p in img_plants})),
                origin=ORIGIN_IMAGE,
                source_id=f"s{s}-i{i}",
            )
            for i, img_plants in enumerate(shown)
        )
        visible = {p.word for img_plants in shown for p in img_plants}
        extras = {p.word for p in rng.sample(planted.plants, 2)}
        reference = frozenset(rng.sample(sorted(visible), len(visible) // 2) if visible else []) | extras
        streams.append(EvalStream(
            story_id=f"stream{s}", transactions=transactions, reference=reference
        ))
    return streams


def expected_stream_metrics(
    planted: PlantedSet,
    streams: list[EvalStream],
    supp_min: int,
    conf_min,
    strict: bool = False,
) -> list[dict]:
    """Closed-form per-stream num/hit/precision/recall for the planted set."""
    surviving = planted.surviving_words(supp_min, conf_min, strict)
    by_visual = {p.visual_item: p.word for p in planted.plants}
    rows = []
    for stream in streams:
        inferred = {
            by_visual[item]
            for t in stream.transactions
            for item in t.items
            if by_visual.get(item) in surviving
        }
        num = len(inferred)
        hit = len(inferred & set(stream.reference))
        rows.append({
            "num": num,
            "hit": hit,
            "precision": Fraction(hit, num) if num else Fraction(0),
            "recall": Fraction(hit, len(stream.reference)) if stream.reference else Fraction(0),
        })
    return rows


def write_planted_files(
    directory,
    seed: int = 0,
    n_plants: int = 20,
    n_stories: int = 100,
    feature_dim: int = 64,
    top_k: int = 2,
) -> dict:
    """File-level counterpart for CLI runs: features plus annotations.

    Image j for plant i activates dims {p_i, partner_i} far above the
    noise floor, so a top-2 image transaction is exactly that pair.  Its
    sentence mentions the plant's word or a filler token.  No closed-form
    rule set is promised here (partner dims co-occur); the files exist for
    end-to-end and determinism runs.
    """
    rng = random.Random(seed)
    directory = Path(directory)
    words = [f"w{idx:02d}" for idx in range(n_plants)]
    features = []
    stories = []
    image_no = 0
    for s in range(n_stories):
        images = []
        for _ in range(5):
            idx = rng.randrange(n_plants)
            image_id = f"img{image_no:04d}"
            image_no += 1
            activation = [rng.uniform(-0.4, 0.4) for _ in range(feature_dim)]
            activation[idx] = 10.0
            activation[n_plants + idx % 7] = 8.0
            features.append({"id": image_id, "activation": activation})
            token = words[idx] if rng.random() < 0.7 else "filler"
            images.append({"image_id": image_id, "tokens": [token, "scene"]})
        stories.append({"story_id": f"story{s:03d}", "images": images})
    features_path = directory / "features.jsonl"
    annotations_path = directory / "annotations.jsonl"
    with open(features_path, "w", encoding="utf-8") as fh:
        for record in features:
            fh.write(json.dumps(record) + "\n")
    with open(annotations_path, "w", encoding="utf-8") as fh:
        for record in stories:
            fh.write(json.dumps(record) + "\n")
    return {
        "features": features_path,
        "annotations": annotations_path,
        "feature_dim": feature_dim,
        "top_k": top_k,
        "n_images": image_no,
        "n_stories": n_stories,
    }


def db_from_items(
    items_lists, feature_dim: int, vocab_words=None
) -> TransactionDatabase:
    """Shorthand database from bare item tuples (cross-modal origin)."""
    if vocab_words is None:
        top = max((max(t) for t in items_lists if t), default=feature_dim - 1)
        vocab_words = [f"v{idx}" for idx in range(max(1, top - feature_dim + 1))]
    vocab = Vocabulary(list(vocab_words))
    transactions = [
        Transaction(items=tuple(t), origin=ORIGIN_CROSS, source_id=f"t{n}")
        for n, t in enumerate(items_lists)
    ]
    return TransactionDatabase(
        feature_dim=feature_dim, vocabulary=vocab, transactions=transactions
    )


def random_database(
    rng: random.Random,
    max_transactions: int = 20,
    max_items: int = 12,
    feature_dim: int = 6,
) -> TransactionDatabase:
    """Small random cross-modal database for oracle-equivalence checks."""
    universe_size = rng.randint(2, max_items)
    vocab_words = [f"v{idx}" for idx in range(max(1, universe_size - feature_dim))]
    vocab = Vocabulary(vocab_words)
    universe = list(range(min(universe_size, feature_dim + vocab.size - 1)))
    transactions = []
    for t in range(rng.randint(1, max_transactions)):
        size = rng.randint(1, min(len(universe), 6))
        items = tuple(sorted(rng.sample(universe, size)))
        transactions.append(Transaction(
            items=items, origin=ORIGIN_CROSS, source_id=f"t{t}"
        ))
    return TransactionDatabase(
        feature_dim=feature_dim, vocabulary=vocab, transactions=transactions
    )
