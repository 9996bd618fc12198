"""Shared building blocks: parameter registry conventions and the Linear
layer used by both sequence models.

Parameters are plain Tensors with requires_grad=True, collected into an
ordered {name: Tensor} dict per model; optimizer, checkpointing and
gradient checking all work off that dict.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Linear:
    """y = x @ W (+ b) with W stored (in, out)."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 bias: bool = True):
        self.weight = Tensor(xavier_uniform(rng, in_dim, out_dim), requires_grad=True)
        self.bias = Tensor(np.zeros(out_dim), requires_grad=True) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        y = x @ self.weight
        return y + self.bias if self.bias is not None else y

    def parameters(self, prefix: str) -> dict:
        out = {f"{prefix}.weight": self.weight}
        if self.bias is not None:
            out[f"{prefix}.bias"] = self.bias
        return out


def collect_grads(params: dict) -> dict:
    return {name: p.grad for name, p in params.items()}


def zero_grads(params: dict) -> None:
    for p in params.values():
        p.grad = None


def count_params(params: dict) -> int:
    return sum(p.data.size for p in params.values())


def clip_grad_norm(params: dict, max_norm: float) -> float:
    """Global L2 clip; returns the pre-clip norm."""
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm
