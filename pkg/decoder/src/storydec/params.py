"""Parameter containers, initialization, and npz round-trip."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .autodiff import Tensor, add, matvec, mul, sigmoid, sub, tanh, tensor
from .errors import ShapeError


@dataclass
class GruCell:
    """Standard reset/update-gate recurrence.

    h' = (1 - z) * h + z * candidate, with the reset gate applied to the
    previous state inside the candidate.
    """

    w_z: Tensor
    u_z: Tensor
    b_z: Tensor
    w_r: Tensor
    u_r: Tensor
    b_r: Tensor
    w_n: Tensor
    u_n: Tensor
    b_n: Tensor

    @classmethod
    def create(cls, rng: np.random.Generator, input_size: int, hidden_size: int):
        def mat(rows, cols):
            bound = 1.0 / np.sqrt(cols)
            return tensor(rng.uniform(-bound, bound, size=(rows, cols)))

        return cls(
            w_z=mat(hidden_size, input_size), u_z=mat(hidden_size, hidden_size),
            b_z=tensor(np.zeros(hidden_size)),
            w_r=mat(hidden_size, input_size), u_r=mat(hidden_size, hidden_size),
            b_r=tensor(np.zeros(hidden_size)),
            w_n=mat(hidden_size, input_size), u_n=mat(hidden_size, hidden_size),
            b_n=tensor(np.zeros(hidden_size)),
        )

    @property
    def hidden_size(self) -> int:
        return self.b_z.value.shape[0]

    def step(self, x: Tensor, h: Tensor) -> Tensor:
        z = sigmoid(add(matvec(self.w_z, x), matvec(self.u_z, h), self.b_z))
        r = sigmoid(add(matvec(self.w_r, x), matvec(self.u_r, h), self.b_r))
        candidate = tanh(add(
            matvec(self.w_n, x), matvec(self.u_n, mul(r, h)), self.b_n
        ))
        keep = sub(tensor(np.ones_like(z.value)), z)
        return add(mul(keep, h), mul(z, candidate))


@dataclass
class DecoderParams:
    """Everything the encoder, attention, and generator learn.

    Sizes: feature_dim activations in, d-dim album states (d/2 per
    direction), h-dim generation states, e-dim embeddings over a
    v-word vocabulary.
    """

    feature_dim: int
    d: int
    h: int
    e: int
    v: int
    embedding: Tensor          # e x v
    attention: Tensor          # h x e
    w_v: Tensor                # d x d
    b_v: Tensor
    w_0: Tensor                # h x d
    b_0: Tensor
    w_c: Tensor                # e x e
    b_c: Tensor
    w_h: Tensor                # v x h
    b_h: Tensor
    forward_cell: GruCell      # feature_dim -> d/2
    backward_cell: GruCell
    generator: GruCell         # e + d + e -> h

    @classmethod
    def create(cls, feature_dim: int, d: int, h: int, e: int, v: int,
               seed: int = 0) -> "DecoderParams":
        if d % 2 != 0:
            raise ShapeError(f"album state size must be even, got {d}")
        for name, size in (("feature_dim", feature_dim), ("d", d), ("h", h),
                           ("e", e), ("v", v)):
            if size < 1:
                raise ShapeError(f"{name} must be >= 1, got {size}")
        rng = np.random.default_rng(seed)

        def mat(rows, cols):
            bound = 1.0 / np.sqrt(cols)
            return tensor(rng.uniform(-bound, bound, size=(rows, cols)))

        return cls(
            feature_dim=feature_dim, d=d, h=h, e=e, v=v,
            embedding=mat(e, v),
            attention=mat(h, e),
            w_v=mat(d, d), b_v=tensor(np.zeros(d)),
            w_0=mat(h, d), b_0=tensor(np.zeros(h)),
            w_c=mat(e, e), b_c=tensor(np.zeros(e)),
            w_h=mat(v, h), b_h=tensor(np.zeros(v)),
            forward_cell=GruCell.create(rng, feature_dim, d // 2),
            backward_cell=GruCell.create(rng, feature_dim, d // 2),
            generator=GruCell.create(rng, e + d + e, h),
        )

    def named_tensors(self) -> dict[str, Tensor]:
        named: dict[str, Tensor] = {}
        for field in fields(self):
            attr = getattr(self, field.name)
            if isinstance(attr, Tensor):
                named[field.name] = attr
            elif isinstance(attr, GruCell):
                for sub_field in fields(attr):
                    named[f"{field.name}.{sub_field.name}"] = getattr(
                        attr, sub_field.name
                    )
        return named

    def zero_grads(self) -> None:
        for t in self.named_tensors().values():
            t.grad = None

    def save(self, path) -> None:
        arrays = {name: t.value for name, t in self.named_tensors().items()}
        arrays["_sizes"] = np.array(
            [self.feature_dim, self.d, self.h, self.e, self.v], dtype=np.int64
        )
        np.savez(path, **arrays)

    @classmethod
    def load(cls, path) -> "DecoderParams":
        with np.load(path) as data:
            sizes = data["_sizes"]
            params = cls.create(*(int(n) for n in sizes), seed=0)
            for name, t in params.named_tensors().items():
                stored = data[name]
                if stored.shape != t.value.shape:
                    raise ShapeError(
                        f"{name}: file has {stored.shape}, model needs "
                        f"{t.value.shape}"
                    )
                t.value = stored.astype(np.float64)
        return params
