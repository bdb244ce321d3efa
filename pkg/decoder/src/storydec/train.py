"""Teacher-forced training with optional scheduled sampling.

The objective is mean next-token cross-entropy over the dataset.  Each
epoch updates once per sentence, then records a clean teacher-forced
evaluation loss, so the curve reflects the objective rather than the
sampling noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .autodiff import affine, backward
from .errors import ShapeError, TrainingFailureError
from .model import encode_album, sentence_nll
from .params import DecoderParams

DIVERGENCE_FACTOR = 10.0


@dataclass
class TrainConfig:
    epochs: int = 300
    learning_rate: float = 0.005
    optimizer: str = "adam"            # or "sgd"
    scheduled_sampling: float = 0.0    # final substitution probability
    seed: int = 0
    target_loss: float | None = None   # stop early once reached

    def __post_init__(self):
        if self.epochs < 1:
            raise ShapeError(f"epochs must be >= 1, got {self.epochs}")
        if self.optimizer not in ("adam", "sgd"):
            raise ShapeError(f"unknown optimizer {self.optimizer!r}")
        if not 0.0 <= self.scheduled_sampling <= 1.0:
            raise ShapeError("scheduled sampling probability must be in [0, 1]")


class _Sgd:
    def __init__(self, tensors, learning_rate):
        self.tensors = tensors
        self.learning_rate = learning_rate

    def step(self):
        for t in self.tensors:
            if t.grad is not None:
                t.value = t.value - self.learning_rate * t.grad


class _Adam:
    def __init__(self, tensors, learning_rate, beta1=0.9, beta2=0.999,
                 epsilon=1e-8):
        self.tensors = tensors
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.epsilon = beta1, beta2, epsilon
        self.first = [np.zeros_like(t.value) for t in tensors]
        self.second = [np.zeros_like(t.value) for t in tensors]
        self.count = 0

    def step(self):
        self.count += 1
        scale = (self.learning_rate
                 * np.sqrt(1.0 - self.beta2 ** self.count)
                 / (1.0 - self.beta1 ** self.count))
        for t, m, v in zip(self.tensors, self.first, self.second):
            if t.grad is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * t.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * t.grad * t.grad
            t.value = t.value - scale * m / (np.sqrt(v) + self.epsilon)


def evaluate_loss(examples, params: DecoderParams, bos: int = 0,
                  eos: int = 1) -> float:
    """Mean per-token teacher-forced cross-entropy over the dataset."""
    total, count = 0.0, 0
    for example in examples:
        album = encode_album(example.features, params)
        for sentence, initial, context in zip(
            example.sentences, album.initials, album.contexts
        ):
            nll, steps = sentence_nll(
                sentence + [eos], initial, context, example.concepts,
                params, bos,
            )
            total += float(nll.value)
            count += steps
    return total / count


def train_toy(examples, params: DecoderParams, config: TrainConfig,
              bos: int = 0, eos: int = 1):
    """Fit in place; returns (params, curve) with one (epoch, loss) row
    per completed epoch.

    The scheduled-sampling probability ramps linearly from zero to the
    configured value across epochs.  An epoch loss above ten times the
    starting loss aborts as divergence.
    """
    if not examples:
        raise ShapeError("training needs at least one example")
    tensors = list(params.named_tensors().values())
    if config.optimizer == "adam":
        optimizer = _Adam(tensors, config.learning_rate)
    else:
        optimizer = _Sgd(tensors, config.learning_rate)
    rng = np.random.default_rng(config.seed)
    initial_loss = evaluate_loss(examples, params, bos, eos)
    curve: list[tuple[int, float]] = []
    for epoch in range(1, config.epochs + 1):
        if config.epochs > 1:
            ramp = (epoch - 1) / (config.epochs - 1)
        else:
            ramp = 1.0
        probability = config.scheduled_sampling * ramp
        for example in examples:
            album = encode_album(example.features, params)
            for sentence, initial, context in zip(
                example.sentences, album.initials, album.contexts
            ):
                nll, steps = sentence_nll(
                    sentence + [eos], initial, context, example.concepts,
                    params, bos,
                    sample_probability=probability, rng=rng,
                )
                params.zero_grads()
                backward(affine(nll, 1.0 / steps))
                optimizer.step()
        loss = evaluate_loss(examples, params, bos, eos)
        curve.append((epoch, loss))
        if loss > initial_loss * DIVERGENCE_FACTOR:
            raise TrainingFailureError(
                f"epoch {epoch}: loss {loss:.4f} exceeds 10x the initial "
                f"{initial_loss:.4f}"
            )
        if config.target_loss is not None and loss < config.target_loss:
            break
    params.zero_grads()
    return params, curve


def save_curve(curve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for epoch, loss in curve:
            writer.writerow([epoch, f"{loss:.10f}"])
