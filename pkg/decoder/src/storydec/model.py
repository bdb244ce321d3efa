"""Album encoding, semantic attention, and the generation step.

The album runs through a bidirectional gated recurrence whose per-position
states initialize one generation recurrence per image.  At every step the
previous generation state attends over the story's concept embeddings; the
context, the visual context, and the last word's embedding feed the next
step.  All functions build autodiff graphs, so the same code path serves
generation and training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (
    Tensor,
    add,
    affine,
    concat,
    gather_col,
    gather_cols,
    log_softmax,
    matvec,
    matvec_t,
    pick,
    relu,
    softmax,
    tanh,
    tensor,
)
from .errors import ShapeError
from .params import DecoderParams

ALBUM_LENGTH = 5


@dataclass
class EncodedAlbum:
    """Per-image album states, visual contexts, and initial generator states."""

    hiddens: list[Tensor]     # d each, backward half then forward half
    contexts: list[Tensor]    # d each
    initials: list[Tensor]    # h each


@dataclass
class AttentionState:
    weights: np.ndarray       # n, non-negative, sums to 1
    mix: Tensor               # e, raw weighted embedding sum
    context: Tensor           # e, tanh-activated


def encode_album(features, params: DecoderParams) -> EncodedAlbum:
    """Bidirectional pass over the five feature vectors.

    Position i keeps [backward_i; forward_i]; the visual context is a
    rectified linear map of it and the generator's initial state an affine
    one.
    """
    if len(features) != ALBUM_LENGTH:
        raise ShapeError(f"album must hold {ALBUM_LENGTH} images, got {len(features)}")
    inputs = []
    for n, feature in enumerate(features):
        vec = np.asarray(feature, dtype=np.float64)
        if vec.shape != (params.feature_dim,):
            raise ShapeError(
                f"image {n}: feature shape {vec.shape}, expected "
                f"({params.feature_dim},)"
            )
        inputs.append(tensor(vec))
    half = params.d // 2
    state = tensor(np.zeros(half))
    forward_states = []
    for x in inputs:
        state = params.forward_cell.step(x, state)
        forward_states.append(state)
    state = tensor(np.zeros(half))
    backward_states = [None] * ALBUM_LENGTH
    for n in range(ALBUM_LENGTH - 1, -1, -1):
        state = params.backward_cell.step(inputs[n], state)
        backward_states[n] = state
    hiddens, contexts, initials = [], [], []
    for fwd, bwd in zip(forward_states, backward_states):
        hidden = concat([bwd, fwd])
        context = relu(add(matvec(params.w_v, hidden), params.b_v))
        hiddens.append(hidden)
        contexts.append(context)
        initials.append(add(matvec(params.w_0, context), params.b_0))
    return EncodedAlbum(hiddens=hiddens, contexts=contexts, initials=initials)


def semantic_attention(h_prev: Tensor, concept_indices,
                       params: DecoderParams) -> AttentionState:
    """Bilinear attention of the previous state over concept embeddings."""
    indices = list(concept_indices)
    if not indices:
        raise ShapeError("attention needs at least one concept")
    for index in indices:
        if not 0 <= index < params.v:
            raise ShapeError(f"concept index {index} outside vocabulary "
                             f"of {params.v}")
    embedded = gather_cols(params.embedding, indices)        # e x n
    scores = matvec_t(embedded, matvec_t(params.attention, h_prev))
    weights = softmax(scores)
    mix = matvec(embedded, weights)
    context = tanh(add(matvec(params.w_c, mix), params.b_c))
    return AttentionState(weights=weights.value, mix=mix, context=context)


def empty_attention(params: DecoderParams) -> AttentionState:
    """No concepts: zero mix, context = tanh of the bias alone."""
    mix = tensor(np.zeros(params.e))
    context = tanh(add(matvec(params.w_c, mix), params.b_c))
    return AttentionState(weights=np.zeros(0), mix=mix, context=context)


def attend(h_prev: Tensor, concept_indices, params: DecoderParams) -> AttentionState:
    if len(concept_indices) == 0:
        return empty_attention(params)
    return semantic_attention(h_prev, concept_indices, params)


def _advance(y_prev: int, h_prev: Tensor, visual_context: Tensor,
             semantic_context: Tensor, params: DecoderParams):
    """Shared next-state/score computation for decoding and training."""
    if not 0 <= y_prev < params.v:
        raise IndexError(f"word index {y_prev} outside vocabulary of {params.v}")
    x = concat([
        gather_col(params.embedding, y_prev),
        visual_context,
        semantic_context,
    ])
    h_next = params.generator.step(x, h_prev)
    scores = add(matvec(params.w_h, h_next), params.b_h)
    return scores, h_next


def decode_step(y_prev: int, h_prev: Tensor, visual_context: Tensor,
                semantic_context: Tensor, params: DecoderParams):
    """One generation step: next-word distribution and next state."""
    scores, h_next = _advance(y_prev, h_prev, visual_context, semantic_context,
                              params)
    return softmax(scores), h_next


def sentence_nll(targets, initial: Tensor, visual_context: Tensor,
                 concept_indices, params: DecoderParams, bos: int,
                 sample_probability: float = 0.0,
                 rng=None) -> tuple[Tensor, int]:
    """Summed negative log-likelihood of the target sequence.

    Teacher forcing by default: step t is fed the begin token, then
    target t-1.  With a positive ``sample_probability`` each input after
    the first is, at that probability, the model's own argmax from the
    previous step instead (scheduled sampling); probability zero draws
    nothing from ``rng``.  Returns (total nll graph, prediction count).
    """
    if not targets:
        raise ShapeError("target sequence is empty")
    h = initial
    y_prev = bos
    losses = []
    for target in targets:
        attention = attend(h, concept_indices, params)
        scores, h = _advance(y_prev, h, visual_context, attention.context,
                             params)
        losses.append(pick(log_softmax(scores), target))
        if sample_probability > 0.0 and rng.random() < sample_probability:
            y_prev = int(np.argmax(scores.value))
        else:
            y_prev = target
    return affine(add(*losses), -1.0), len(losses)
