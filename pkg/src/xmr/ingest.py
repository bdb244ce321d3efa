"""Loading of feature vectors and story annotations, and vocabulary building.

File formats
------------
Features: line-delimited JSON, one ``{"id": str, "activation": [float × D]}``
object per line.  Activation values survive a save/load round trip exactly
(Python's JSON writer emits shortest-repr decimals, well past the required
7 significant digits).

Annotations: line-delimited JSON ``{"story_id": str, "images": [...]}`` where
each of the exactly five image entries carries ``"image_id"`` and either a
``"tokens"`` list or a raw ``"sentence"`` string.  Raw sentences are
lowercased and split on non-alphanumeric characters.

Vocabulary: a single JSON object ``{"unk": str, "words": [str, ...]}`` where
list position is the word index.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    ParseError,
    StructureError,
)

UNK_WORD = "<UNK>"
STORY_LENGTH = 5

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split a raw sentence into alphanumeric tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class StoryImage:
    image_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Story:
    story_id: str
    images: tuple[StoryImage, ...]

    def image_ids(self) -> tuple[str, ...]:
        return tuple(img.image_id for img in self.images)


@dataclass
class FeatureTable:
    """Image id -> pre-pooled activation vector, all of length ``feature_dim``."""

    feature_dim: int
    entries: dict[str, list[float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self.entries

    def __getitem__(self, image_id: str) -> list[float]:
        return self.entries[image_id]


@dataclass
class AnnotationTable:
    """Stories in file order; every story has exactly five annotated images."""

    stories: list[Story] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.stories)

    def __iter__(self):
        return iter(self.stories)


class Vocabulary:
    """Bijective word/index mapping with a reserved UNK slot.

    Indices are contiguous from 0.  Regular words occupy the leading
    positions; the UNK word always sits at the last index (``unk_index ==
    size - 1``).  Looking up a word that was never indexed returns the UNK
    index.
    """

    def __init__(self, words: Sequence[str], unk_word: str = UNK_WORD):
        if unk_word in words:
            raise ValueError(f"word list must not contain the UNK word {unk_word!r}")
        self.unk_word = unk_word
        self._words: list[str] = list(words) + [unk_word]
        self._index: dict[str, int] = {w: i for i, w in enumerate(self._words)}
        if len(self._index) != len(self._words):
            raise ValueError("word list contains duplicates")

    @property
    def size(self) -> int:
        return len(self._words)

    @property
    def unk_index(self) -> int:
        return len(self._words) - 1

    @property
    def words(self) -> list[str]:
        """All words in index order, UNK last."""
        return list(self._words)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, word: str) -> bool:
        return word in self._index and word != self.unk_word

    def lookup(self, word: str) -> int:
        """Index of ``word``, or the UNK index if it was never indexed."""
        return self._index.get(word, self.unk_index)

    def word_for(self, index: int) -> str:
        if not 0 <= index < self.size:
            raise IndexError(f"vocabulary index {index} out of range [0, {self.size})")
        return self._words[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._words == other._words


def load_features(path, feature_dim: int) -> FeatureTable:
    """Read a line-delimited JSON feature file.

    Raises :class:`ParseError` for malformed lines, :class:`DimensionMismatchError`
    when a vector does not have ``feature_dim`` entries, and
    :class:`DuplicateIdError` for repeated image ids.
    """
    if feature_dim < 1:
        raise ValueError("feature_dim must be positive")
    table = FeatureTable(feature_dim=feature_dim)
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, str(exc), line_no=line_no) from exc
            if not isinstance(record, dict) or "id" not in record or "activation" not in record:
                raise ParseError(
                    path, "expected object with 'id' and 'activation'", line_no=line_no
                )
            image_id = record["id"]
            activation = record["activation"]
            if not isinstance(image_id, str):
                raise ParseError(path, "'id' must be a string", line_no=line_no)
            if not isinstance(activation, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in activation
            ):
                raise ParseError(path, "'activation' must be a numeric list", line_no=line_no)
            if len(activation) != feature_dim:
                raise DimensionMismatchError(
                    f"image {image_id!r}: activation has {len(activation)} values, "
                    f"expected {feature_dim}"
                )
            if image_id in table.entries:
                raise DuplicateIdError(f"duplicate image id {image_id!r} in {path}")
            table.entries[image_id] = [float(x) for x in activation]
    return table


def save_features(table: FeatureTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for image_id, activation in table.entries.items():
            fh.write(json.dumps({"id": image_id, "activation": activation}) + "\n")


def _image_entry(record_images, idx, story_id, path, line_no) -> StoryImage:
    entry = record_images[idx]
    if not isinstance(entry, dict) or "image_id" not in entry:
        raise ParseError(
            path, f"story {story_id!r}: image {idx} lacks 'image_id'", line_no=line_no
        )
    image_id = entry["image_id"]
    if "tokens" in entry:
        tokens = entry["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ParseError(
                path, f"story {story_id!r}: 'tokens' must be a string list", line_no=line_no
            )
    elif "sentence" in entry:
        tokens = tokenize(entry["sentence"])
    else:
        raise ParseError(
            path,
            f"story {story_id!r}: image {image_id!r} needs 'tokens' or 'sentence'",
            line_no=line_no,
        )
    if not tokens:
        raise StructureError(
            f"story {story_id!r}: image {image_id!r} has an empty sentence"
        )
    return StoryImage(image_id=image_id, tokens=tuple(tokens))


def load_annotations(path) -> AnnotationTable:
    """Read a line-delimited JSON annotation file, preserving story order.

    Raises :class:`StructureError` when a story does not list exactly five
    images or carries an empty sentence.
    """
    table = AnnotationTable()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, str(exc), line_no=line_no) from exc
            if not isinstance(record, dict) or "story_id" not in record or "images" not in record:
                raise ParseError(
                    path, "expected object with 'story_id' and 'images'", line_no=line_no
                )
            story_id = record["story_id"]
            images = record["images"]
            if not isinstance(images, list) or len(images) != STORY_LENGTH:
                count = len(images) if isinstance(images, list) else "non-list"
                raise StructureError(
                    f"story {story_id!r} lists {count} images, expected {STORY_LENGTH}"
                )
            table.stories.append(
                Story(
                    story_id=story_id,
                    images=tuple(
                        _image_entry(images, i, story_id, path, line_no)
                        for i in range(STORY_LENGTH)
                    ),
                )
            )
    return table


def build_vocabulary(annotations: AnnotationTable, min_count: int) -> Vocabulary:
    """Index every corpus word occurring at least ``min_count`` times.

    Indices run by descending frequency with lexicographic tie-break, so
    vocabulary construction is reproducible.  Anything below the threshold
    maps to UNK on lookup.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    for story in annotations:
        for image in story.images:
            counts.update(image.tokens)
    counts.pop(UNK_WORD, None)
    kept = sorted(
        (w for w, c in counts.items() if c >= min_count),
        key=lambda w: (-counts[w], w),
    )
    return Vocabulary(kept)


def save_vocabulary(vocab: Vocabulary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"unk": vocab.unk_word, "words": vocab.words}, fh)
        fh.write("\n")


def load_vocabulary(path) -> Vocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, str(exc)) from exc
    if not isinstance(obj, dict) or "unk" not in obj or "words" not in obj:
        raise ParseError(path, "expected object with 'unk' and 'words'")
    words = obj["words"]
    unk = obj["unk"]
    if not words or words[-1] != unk:
        raise ParseError(path, f"UNK word {unk!r} must close the word list")
    return Vocabulary(words[:-1], unk_word=unk)


def word_frequencies(annotations: AnnotationTable) -> Counter:
    """Raw corpus token counts (exposed for diagnostics and tests)."""
    counts: Counter[str] = Counter()
    for story in annotations:
        for image in story.images:
            counts.update(image.tokens)
    return counts
