"""Toy dataset plumbing.

Reads the rule miner's file formats as they are written: features JSONL
{"id", "activation"}, concepts JSONL {"story_id", "concepts", ...}, and
story annotations JSONL {"story_id", "images": [{"image_id", "tokens"}]}.
Also synthesizes small corpora in those same formats for memorization
runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError

BOS_WORD = "<s>"
EOS_WORD = "</s>"
STORY_LENGTH = 5


class ToyVocab:
    """Begin and end markers first, then the corpus words, sorted."""

    def __init__(self, words):
        self.words = [BOS_WORD, EOS_WORD] + sorted(set(words))
        if len(self.words) != len(set(self.words)):
            raise ParseError("corpus words collide with the reserved markers")
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def bos(self) -> int:
        return 0

    @property
    def eos(self) -> int:
        return 1

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def encode(self, token: str) -> int:
        if token not in self._index:
            raise ParseError(f"token {token!r} is not in the vocabulary")
        return self._index[token]

    def decode(self, index: int) -> str:
        return self.words[index]


@dataclass
class StoryExample:
    story_id: str
    features: list[list[float]]      # 5 x feature_dim
    concepts: list[int]              # vocabulary indices, deduplicated
    sentences: list[list[int]]       # 5 token-index lists, no markers


def _read_jsonl(path):
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield number, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{number}: {exc}") from None


def load_features(path, feature_dim: int) -> dict[str, list[float]]:
    features: dict[str, list[float]] = {}
    for number, record in _read_jsonl(path):
        try:
            image_id, activation = record["id"], record["activation"]
        except (KeyError, TypeError):
            raise ParseError(f"{path}:{number}: need id and activation") from None
        if len(activation) != feature_dim:
            raise ParseError(
                f"{path}:{number}: {image_id!r} has {len(activation)} values, "
                f"expected {feature_dim}"
            )
        features[image_id] = [float(x) for x in activation]
    return features


def load_concepts(path) -> dict[str, list[str]]:
    concepts: dict[str, list[str]] = {}
    for number, record in _read_jsonl(path):
        try:
            concepts[record["story_id"]] = list(record["concepts"])
        except (KeyError, TypeError):
            raise ParseError(
                f"{path}:{number}: need story_id and concepts"
            ) from None
    return concepts


def load_stories(path) -> list[tuple[str, list[str], list[list[str]]]]:
    """(story_id, five image ids, five token lists) per record."""
    stories = []
    for number, record in _read_jsonl(path):
        try:
            story_id, images = record["story_id"], record["images"]
        except (KeyError, TypeError):
            raise ParseError(f"{path}:{number}: need story_id and images") from None
        if len(images) != STORY_LENGTH:
            raise ParseError(
                f"{path}:{number}: story {story_id!r} has {len(images)} images, "
                f"expected {STORY_LENGTH}"
            )
        ids = [img["image_id"] for img in images]
        token_lists = [[str(t) for t in img["tokens"]] for img in images]
        stories.append((story_id, ids, token_lists))
    return stories


def build_examples(features_path, concepts_path, stories_path,
                   feature_dim: int) -> tuple[list[StoryExample], ToyVocab]:
    """Join the three files into training examples plus their vocabulary."""
    features = load_features(features_path, feature_dim)
    concepts = load_concepts(concepts_path)
    stories = load_stories(stories_path)
    words = sorted({t for _, _, sentences in stories for s in sentences for t in s})
    vocab = ToyVocab(words)
    examples = []
    for story_id, image_ids, sentences in stories:
        for image_id in image_ids:
            if image_id not in features:
                raise ParseError(
                    f"story {story_id!r}: image {image_id!r} has no features"
                )
        concept_words = concepts.get(story_id, [])
        concept_indices = sorted({
            vocab.encode(w) for w in concept_words if w in vocab
        })
        examples.append(StoryExample(
            story_id=story_id,
            features=[features[i] for i in image_ids],
            concepts=concept_indices,
            sentences=[[vocab.encode(t) for t in s] for s in sentences],
        ))
    return examples, vocab


def synth_toy_corpus(directory, seed: int = 0, n_stories: int = 10,
                     n_words: int = 48, feature_dim: int = 16) -> dict:
    """Write a small corpus in the miner's file formats.

    Unused word types are drawn before any repeats, so every type occurs
    somewhere once the corpus holds at least n_words tokens.  Each story
    gets distinct random features and a concept list drawn from its own
    sentences, so examples are mutually distinguishable and memorization
    is well posed.
    """
    rng = np.random.default_rng(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    words = [f"w{n:02d}" for n in range(n_words)]
    unused = list(words)
    features, stories, concepts = [], [], []
    for s in range(n_stories):
        story_id = f"toy{s:02d}"
        image_records = []
        story_words = set()
        for i in range(STORY_LENGTH):
            image_id = f"{story_id}-img{i}"
            features.append({
                "id": image_id,
                "activation": [round(float(x), 6)
                               for x in rng.normal(0.0, 1.0, feature_dim)],
            })
            length = int(rng.integers(3, 6))
            tokens = []
            for _ in range(length):
                if unused:
                    tokens.append(unused.pop())
                else:
                    tokens.append(words[int(rng.integers(0, n_words))])
            rng.shuffle(tokens)
            story_words.update(tokens)
            image_records.append({"image_id": image_id, "tokens": tokens})
        stories.append({"story_id": story_id, "images": image_records})
        pool = sorted(story_words)
        count = min(len(pool), int(rng.integers(3, 7)))
        picked = sorted(rng.choice(len(pool), size=count, replace=False))
        concepts.append({
            "story_id": story_id,
            "concepts": [pool[i] for i in picked],
        })
    paths = {
        "features": directory / "features.jsonl",
        "concepts": directory / "concepts.jsonl",
        "stories": directory / "stories.jsonl",
    }
    for path, records in ((paths["features"], features),
                          (paths["concepts"], concepts),
                          (paths["stories"], stories)):
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record) + "\n")
    return {**paths, "feature_dim": feature_dim, "n_stories": n_stories,
            "vocab_size": n_words - len(unused) + 2}
