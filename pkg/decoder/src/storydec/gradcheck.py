"""Analytic gradients against central finite differences.

Double precision throughout, step 1e-5.  The relative error of a pair is
zero when both values agree exactly (covers all-zero models); otherwise
|a - n| / max(|a|, |n|, 1e-4).  The floor keeps finite-difference noise
on dead paths (true gradient zero, numeric estimate ~1e-10) from
registering as disagreement while still flagging any absolute error a
central difference can reliably see.
"""

from __future__ import annotations

import numpy as np

from .autodiff import affine, backward
from .model import encode_album, sentence_nll
from .params import DecoderParams

STEP = 1e-5
FLOOR = 1e-4

# The middle image: its hidden state sits mid-chain in both encoder
# directions, so every gate matrix of every cell carries gradient.  A
# first-position sentence would leave the forward cell's recurrent
# matrices structurally at zero (they multiply a zero initial state).
CHECK_IMAGE = 2


def relative_error(analytic: float, numeric: float) -> float:
    if analytic == numeric:
        return 0.0
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), FLOOR)


def example_loss(params: DecoderParams, features, concepts, targets,
                 image_index: int = CHECK_IMAGE) -> float:
    album = encode_album(features, params)
    nll, steps = sentence_nll(
        targets, album.initials[image_index], album.contexts[image_index],
        concepts, params, bos=0,
    )
    return float(nll.value) / steps


def gradient_check(params: DecoderParams, features, concepts, targets,
                   image_index: int = CHECK_IMAGE) -> float:
    """Max relative error over every entry of every parameter tensor."""
    album = encode_album(features, params)
    nll, steps = sentence_nll(
        targets, album.initials[image_index], album.contexts[image_index],
        concepts, params, bos=0,
    )
    params.zero_grads()
    backward(affine(nll, 1.0 / steps))
    worst = 0.0
    for name, t in params.named_tensors().items():
        analytic = np.zeros_like(t.value) if t.grad is None else t.grad
        flat = t.value.reshape(-1)
        flat_grad = analytic.reshape(-1)
        for index in range(flat.size):
            kept = flat[index]
            flat[index] = kept + STEP
            up = example_loss(params, features, concepts, targets, image_index)
            flat[index] = kept - STEP
            down = example_loss(params, features, concepts, targets, image_index)
            flat[index] = kept
            numeric = (up - down) / (2.0 * STEP)
            worst = max(worst, relative_error(float(flat_grad[index]), numeric))
    params.zero_grads()
    return worst
