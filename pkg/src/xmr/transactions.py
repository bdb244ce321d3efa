"""Integer transactions over a shared item space and the database builder.

Item encoding: activation dimensions occupy ``[0, D)``; vocabulary words are
shifted up by the feature dimension and occupy ``[D, D + v)``.  An image
transaction keeps the indices of the k largest activation magnitudes, a text
transaction the shifted indices of its (in-vocabulary, non-UNK) words, and a
cross-modal transaction is their sorted union.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyInputError, JoinError, OriginError, ParseError
from .ingest import AnnotationTable, FeatureTable, Vocabulary
from .lexicon import STOPWORDS, lemmatize

ORIGIN_IMAGE = "image"
ORIGIN_TEXT = "text"
ORIGIN_CROSS = "cross-modal"

TEXT_MODES = ("passthrough", "heuristic")


@dataclass(frozen=True)
class Transaction:
    """A strictly ascending set of item ids with a modality tag."""

    items: tuple[int, ...]
    origin: str
    source_id: str = ""

    def __post_init__(self):
        if self.origin not in (ORIGIN_IMAGE, ORIGIN_TEXT, ORIGIN_CROSS):
            raise ValueError(f"unknown origin {self.origin!r}")
        items = tuple(self.items)
        object.__setattr__(self, "items", items)
        if any(not isinstance(i, int) or i < 0 for i in items):
            raise ValueError("items must be non-negative integers")
        if any(a >= b for a, b in zip(items, items[1:])):
            raise ValueError("items must be strictly ascending")

    def __len__(self) -> int:
        return len(self.items)

    def item_set(self) -> frozenset[int]:
        return frozenset(self.items)


@dataclass(frozen=True)
class MiningParams:
    """Thresholds shared by the whole pipeline.

    ``supp_min`` is an absolute transaction count; ``conf_min`` is kept as an
    exact rational so threshold comparisons never round.
    """

    top_k: int = 10
    supp_min: int = 3
    conf_min: Fraction = Fraction(3, 5)
    max_len: int | None = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.supp_min < 1:
            raise ValueError("supp_min must be >= 1")
        conf = _as_fraction(self.conf_min)
        object.__setattr__(self, "conf_min", conf)
        if not 0 < conf <= 1:
            raise ValueError("conf_min must lie in (0, 1]")
        if self.max_len is not None and self.max_len < 1:
            raise ValueError("max_len must be >= 1 when set")


def _as_fraction(value) -> Fraction:
    # Floats go through their decimal repr so 0.6 means 3/5, not the
    # nearest binary double.
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass
class TransactionDatabase:
    """Ordered transactions plus the item universe they draw from."""

    feature_dim: int
    vocabulary: Vocabulary
    transactions: list[Transaction] = field(default_factory=list)
    top_k: int | None = None

    def __post_init__(self):
        limit = self.feature_dim + self.vocabulary.size
        for t in self.transactions:
            if t.items and t.items[-1] >= limit:
                raise ValueError(
                    f"transaction {t.source_id!r} holds item {t.items[-1]}, "
                    f"universe ends at {limit}"
                )

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self):
        return iter(self.transactions)


def build_image_transaction(
    activation: Sequence[float], top_k: int, source_id: str = ""
) -> Transaction:
    """Keep the dimension indices of the ``top_k`` largest activation
    magnitudes, favouring the smaller index on ties."""
    if len(activation) == 0:
        raise EmptyInputError("activation vector is empty")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    order = sorted(range(len(activation)), key=lambda i: (-abs(activation[i]), i))
    kept = sorted(order[: min(top_k, len(activation))])
    return Transaction(items=tuple(kept), origin=ORIGIN_IMAGE, source_id=source_id)


def preprocess_tokens(tokens: Iterable[str], mode: str) -> set[str]:
    """Reduce raw tokens to a deduplicated semantic word set.

    ``passthrough`` only deduplicates (for callers with an external tagger
    and lemmatizer); ``heuristic`` lowercases, drops stopwords, and applies
    the built-in lemmatizer, discarding words whose lemma is itself a
    stopword.
    """
    if mode not in TEXT_MODES:
        raise ValueError(f"mode must be one of {TEXT_MODES}, got {mode!r}")
    if mode == "passthrough":
        return set(tokens)
    words = set()
    for token in tokens:
        token = token.lower()
        if token in STOPWORDS:
            continue
        lemma = lemmatize(token)
        if lemma in STOPWORDS:
            continue
        words.add(lemma)
    return words


def build_text_transaction(
    words: Iterable[str], vocab: Vocabulary, feature_dim: int, source_id: str = ""
) -> Transaction:
    """Encode an in-vocabulary word set as shifted items; unknowns drop out."""
    items = sorted(
        vocab.lookup(w) + feature_dim for w in set(words) if w in vocab
    )
    return Transaction(items=tuple(items), origin=ORIGIN_TEXT, source_id=source_id)


def build_cross_modal_transaction(img: Transaction, txt: Transaction) -> Transaction:
    """Concatenate an image transaction with its text transaction."""
    if img.origin != ORIGIN_IMAGE:
        raise OriginError(f"expected an image transaction, got {img.origin!r}")
    if txt.origin != ORIGIN_TEXT:
        raise OriginError(f"expected a text transaction, got {txt.origin!r}")
    items = tuple(sorted(set(img.items) | set(txt.items)))
    return Transaction(
        items=items, origin=ORIGIN_CROSS, source_id=img.source_id or txt.source_id
    )


def build_database(
    features: FeatureTable,
    annotations: AnnotationTable,
    vocab: Vocabulary,
    params: MiningParams,
    text_mode: str = "heuristic",
    threads: int = 1,
) -> TransactionDatabase:
    """Assemble one cross-modal transaction per annotated image.

    The text part pools words from every story sentence that describes the
    image; database order follows the first annotation occurrence of each
    image.  Images without annotations are excluded.
    """
    order: list[str] = []
    pooled: dict[str, set[str]] = {}
    for story in annotations:
        for image in story.images:
            if image.image_id not in features:
                raise JoinError(
                    f"annotated image {image.image_id!r} (story {story.story_id!r}) "
                    f"has no feature record"
                )
            if image.image_id not in pooled:
                pooled[image.image_id] = set()
                order.append(image.image_id)
            pooled[image.image_id] |= preprocess_tokens(image.tokens, text_mode)

    def one(image_id: str) -> Transaction:
        img = build_image_transaction(
            features[image_id], params.top_k, source_id=image_id
        )
        txt = build_text_transaction(
            pooled[image_id], vocab, features.feature_dim, source_id=image_id
        )
        return build_cross_modal_transaction(img, txt)

    if threads > 1 and len(order) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            transactions = list(pool.map(one, order))
    else:
        transactions = [one(image_id) for image_id in order]
    return TransactionDatabase(
        feature_dim=features.feature_dim,
        vocabulary=vocab,
        transactions=transactions,
        top_k=params.top_k,
    )


def save_database(db: TransactionDatabase, path) -> None:
    header = {
        "feature_dim": db.feature_dim,
        "vocab_size": db.vocabulary.size,
        "top_k": db.top_k,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for t in db.transactions:
            fh.write(json.dumps({"source_id": t.source_id, "items": list(t.items)}) + "\n")


def load_database(path, vocab: Vocabulary) -> TransactionDatabase:
    """Read a transaction database written by :func:`save_database`.

    The vocabulary is supplied by the caller (the file records only its
    size) and must match the header.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ParseError(path, str(exc), line_no=1) from exc
        if not isinstance(header, dict) or "feature_dim" not in header:
            raise ParseError(path, "missing database header", line_no=1)
        if header.get("vocab_size") != vocab.size:
            raise ParseError(
                path,
                f"header vocab_size {header.get('vocab_size')} != vocabulary size {vocab.size}",
                line_no=1,
            )
        transactions = []
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, str(exc), line_no=line_no) from exc
            transactions.append(
                Transaction(
                    items=tuple(record["items"]),
                    origin=ORIGIN_CROSS,
                    source_id=record.get("source_id", ""),
                )
            )
    return TransactionDatabase(
        feature_dim=header["feature_dim"],
        vocabulary=vocab,
        transactions=transactions,
        top_k=header.get("top_k"),
    )
