"""Beam-search story generation.

Scores are sums of next-token log-probabilities, no length normalization.
The greedy rollout is always added to the candidate pool, so the best
returned score never falls below it and width 1 is exactly greedy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .model import attend, decode_step, encode_album
from .params import DecoderParams

MAX_SENTENCE_LENGTH = 30


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[int, ...]   # emitted tokens, end token excluded
    score: float              # sum of log p
    finished: bool


def _log_probs(y_prev, state, visual_context, concepts, params):
    attention = attend(state, concepts, params)
    probs, h_next = decode_step(y_prev, state, visual_context,
                                attention.context, params)
    return np.log(probs.value), h_next


def _greedy(initial, visual_context, concepts, params, bos, eos,
            max_length) -> Hypothesis:
    state, y_prev = initial, bos
    tokens, score = [], 0.0
    for _ in range(max_length):
        log_p, state = _log_probs(y_prev, state, visual_context, concepts,
                                  params)
        y_prev = int(np.argmax(log_p))
        score += float(log_p[y_prev])
        if y_prev == eos:
            return Hypothesis(tuple(tokens), score, True)
        tokens.append(y_prev)
    return Hypothesis(tuple(tokens), score, False)


def beam_search_sentence(initial, visual_context, concepts,
                         params: DecoderParams, beam_width: int,
                         bos: int, eos: int,
                         max_length: int = MAX_SENTENCE_LENGTH) -> list[Hypothesis]:
    """Hypotheses for one sentence, best first, at most beam_width of them."""
    if beam_width < 1:
        raise ShapeError(f"beam width must be >= 1, got {beam_width}")
    live = [(0.0, (), bos, initial)]   # score, tokens, last word, state
    finished: dict[tuple[int, ...], Hypothesis] = {}

    def offer(hyp: Hypothesis) -> None:
        kept = finished.get(hyp.tokens)
        if kept is None or hyp.score > kept.score:
            finished[hyp.tokens] = hyp

    for _ in range(max_length):
        candidates = []
        for score, tokens, y_prev, state in live:
            log_p, h_next = _log_probs(y_prev, state, visual_context,
                                       concepts, params)
            top = np.argsort(log_p)[::-1][:beam_width]
            for word in top:
                word = int(word)
                total = score + float(log_p[word])
                if word == eos:
                    offer(Hypothesis(tokens, total, True))
                else:
                    candidates.append((total, tokens + (word,), word, h_next))
        candidates.sort(key=lambda c: (-c[0], c[1]))
        live = candidates[:beam_width]
        if not live:
            break
    for score, tokens, _, _ in live:
        offer(Hypothesis(tokens, score, False))
    offer(_greedy(initial, visual_context, concepts, params, bos, eos,
                  max_length))
    ranked = sorted(finished.values(), key=lambda h: (-h.score, h.tokens))
    return ranked[:beam_width]


def generate_story(features, concepts, params: DecoderParams,
                   beam_width: int, bos: int, eos: int,
                   max_length: int = MAX_SENTENCE_LENGTH) -> list[list[int]]:
    """Best sentence per image; the five together are the story."""
    album = encode_album(features, params)
    sentences = []
    for initial, visual_context in zip(album.initials, album.contexts):
        best = beam_search_sentence(
            initial, visual_context, concepts, params, beam_width, bos, eos,
            max_length,
        )[0]
        sentences.append(list(best.tokens))
    return sentences


def save_stories(stories, path) -> None:
    """stories: iterable of (story_id, five token-string lists)."""
    with open(path, "w", encoding="utf-8") as fh:
        for story_id, sentences in stories:
            record = {"story_id": story_id, "sentences": sentences}
            fh.write(json.dumps(record) + "\n")
