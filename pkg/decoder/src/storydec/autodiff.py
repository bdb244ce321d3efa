"""Minimal reverse-mode autodiff on float64 numpy arrays.

Just enough surface for a gated-recurrence decoder: vectors flow through
the graph, matrices appear only as parameters.  Every op builds one node;
``backward`` walks the tape once in reverse topological order.  No
broadcasting rules beyond what the ops state; shapes are the caller's
contract.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("value", "grad", "_parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Tensor(shape={self.value.shape})"


def _accum(t: Tensor, delta) -> None:
    if t.grad is None:
        t.grad = np.zeros_like(t.value)
    t.grad += delta


def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(node) into .grad over the whole tape.

    Grads add up across calls; clear parameter grads between steps.
    """
    if loss.value.size != 1:
        raise ValueError(f"backward needs a scalar, got shape {loss.value.shape}")
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            stack.append((parent, False))
    _accum(loss, np.ones_like(loss.value))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def tensor(value) -> Tensor:
    """A leaf; parameters and constants alike."""
    return Tensor(value)


def matvec(w: Tensor, x: Tensor) -> Tensor:
    out = Tensor(w.value @ x.value, (w, x))

    def bw(g):
        _accum(w, np.outer(g, x.value))
        _accum(x, w.value.T @ g)

    out._backward = bw
    return out


def matvec_t(a: Tensor, x: Tensor) -> Tensor:
    """aᵀ x for a matrix a and vector x."""
    out = Tensor(a.value.T @ x.value, (a, x))

    def bw(g):
        _accum(a, np.outer(x.value, g))
        _accum(x, a.value @ g)

    out._backward = bw
    return out


def add(*ts: Tensor) -> Tensor:
    out = Tensor(sum(t.value for t in ts), tuple(ts))

    def bw(g):
        for t in ts:
            _accum(t, g)

    out._backward = bw
    return out


def sub(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.value - b.value, (a, b))

    def bw(g):
        _accum(a, g)
        _accum(b, -g)

    out._backward = bw
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.value * b.value, (a, b))

    def bw(g):
        _accum(a, g * b.value)
        _accum(b, g * a.value)

    out._backward = bw
    return out


def affine(t: Tensor, scale: float, shift: float = 0.0) -> Tensor:
    """scale * t + shift with plain float coefficients."""
    out = Tensor(scale * t.value + shift, (t,))

    def bw(g):
        _accum(t, scale * g)

    out._backward = bw
    return out


def dot(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(np.dot(a.value, b.value), (a, b))

    def bw(g):
        _accum(a, g * b.value)
        _accum(b, g * a.value)

    out._backward = bw
    return out


def sigmoid(t: Tensor) -> Tensor:
    x = t.value
    s = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                 np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    out = Tensor(s, (t,))

    def bw(g):
        _accum(t, g * s * (1.0 - s))

    out._backward = bw
    return out


def tanh(t: Tensor) -> Tensor:
    y = np.tanh(t.value)
    out = Tensor(y, (t,))

    def bw(g):
        _accum(t, g * (1.0 - y * y))

    out._backward = bw
    return out


def relu(t: Tensor) -> Tensor:
    mask = t.value > 0
    out = Tensor(np.where(mask, t.value, 0.0), (t,))

    def bw(g):
        _accum(t, g * mask)

    out._backward = bw
    return out


def concat(ts) -> Tensor:
    ts = tuple(ts)
    out = Tensor(np.concatenate([t.value for t in ts]), ts)
    sizes = [t.value.shape[0] for t in ts]

    def bw(g):
        offset = 0
        for t, size in zip(ts, sizes):
            _accum(t, g[offset:offset + size])
            offset += size

    out._backward = bw
    return out


def softmax(t: Tensor) -> Tensor:
    shifted = t.value - t.value.max()
    e = np.exp(shifted)
    y = e / e.sum()
    out = Tensor(y, (t,))

    def bw(g):
        _accum(t, y * (g - np.dot(g, y)))

    out._backward = bw
    return out


def log_softmax(t: Tensor) -> Tensor:
    shifted = t.value - t.value.max()
    log_z = np.log(np.exp(shifted).sum())
    y = shifted - log_z
    out = Tensor(y, (t,))

    def bw(g):
        _accum(t, g - np.exp(y) * g.sum())

    out._backward = bw
    return out


def pick(t: Tensor, index: int) -> Tensor:
    out = Tensor(t.value[index], (t,))

    def bw(g):
        buf = np.zeros_like(t.value)
        buf[index] = g
        _accum(t, buf)

    out._backward = bw
    return out


def gather_col(m: Tensor, col: int) -> Tensor:
    out = Tensor(m.value[:, col], (m,))

    def bw(g):
        buf = np.zeros_like(m.value)
        buf[:, col] = g
        _accum(m, buf)

    out._backward = bw
    return out


def gather_cols(m: Tensor, cols) -> Tensor:
    cols = list(cols)
    out = Tensor(m.value[:, cols], (m,))

    def bw(g):
        buf = np.zeros_like(m.value)
        np.add.at(buf, (slice(None), cols), g)
        _accum(m, buf)

    out._backward = bw
    return out
