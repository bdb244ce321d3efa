"""Toy album-to-story decoder driven by mined visual concepts.

Five image feature vectors are encoded bidirectionally into album
states; each state seeds a word-level recurrence whose input at every
step concatenates the previous word embedding, the image's visual
context, and a semantic attention mix over the album's concept words.
Small enough to verify by finite differences, trained by exact
reverse-mode gradients on plain float64 arrays.
"""

from .autodiff import Tensor, backward, tensor
from .data import (
    BOS_WORD,
    EOS_WORD,
    STORY_LENGTH,
    StoryExample,
    ToyVocab,
    build_examples,
    load_concepts,
    load_features,
    load_stories,
    synth_toy_corpus,
)
from .errors import ParseError, ShapeError, StorydecError, TrainingFailureError
from .generate import (
    MAX_SENTENCE_LENGTH,
    Hypothesis,
    beam_search_sentence,
    generate_story,
    save_stories,
)
from .gradcheck import gradient_check, relative_error
from .model import (
    ALBUM_LENGTH,
    AttentionState,
    EncodedAlbum,
    attend,
    decode_step,
    empty_attention,
    encode_album,
    semantic_attention,
    sentence_nll,
)
from .params import DecoderParams, GruCell
from .train import TrainConfig, evaluate_loss, save_curve, train_toy

__all__ = [
    "ALBUM_LENGTH",
    "AttentionState",
    "BOS_WORD",
    "DecoderParams",
    "EOS_WORD",
    "EncodedAlbum",
    "GruCell",
    "Hypothesis",
    "MAX_SENTENCE_LENGTH",
    "ParseError",
    "STORY_LENGTH",
    "ShapeError",
    "StoryExample",
    "StorydecError",
    "Tensor",
    "ToyVocab",
    "TrainConfig",
    "TrainingFailureError",
    "attend",
    "backward",
    "beam_search_sentence",
    "build_examples",
    "decode_step",
    "empty_attention",
    "encode_album",
    "evaluate_loss",
    "generate_story",
    "gradient_check",
    "load_concepts",
    "load_features",
    "load_stories",
    "relative_error",
    "save_curve",
    "save_stories",
    "semantic_attention",
    "sentence_nll",
    "synth_toy_corpus",
    "tensor",
    "train_toy",
]
