"""Encoder-only sequence model for next-step prediction.

Input and model width are both 15 (the robot state vector), so there is no
input embedding; sinusoidal position information is added directly.  Each
of the 4 encoder layers applies post-norm residual blocks:

    X <- LayerNorm(X + Dropout(MHA(X)))
    X <- LayerNorm(X + Dropout(FFN(X)))

with FFN = Linear(15->240) -> ReLU -> Linear(240->15).  A final
Linear(15->15) maps every position to the predicted leader state one step
ahead.  The causal mask keeps position i blind to positions > i, so the
model can run incrementally at inference time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layers import Linear, count_params
from .tensor import Tensor, dropout, layer_norm, softmax

NEG_INF = -1e9


@dataclass(frozen=True)
class TransformerConfig:
    d_model: int = 15
    n_layers: int = 4
    d_ff: int = 240
    n_heads: int = 3
    dropout_p: float = 0.1
    layernorm_eps: float = 1e-5
    window: int = 100
    causal: bool = True
    positional: str = "sinusoidal"  # or "none"

    def validate(self) -> "TransformerConfig":
        if self.d_model % self.n_heads != 0:
            raise ValueError(
                f"n_heads {self.n_heads} does not divide d_model {self.d_model}")
        if self.positional not in ("sinusoidal", "none"):
            raise ValueError(f"unknown positional encoding {self.positional!r}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p {self.dropout_p} outside [0, 1)")
        if self.window < 1 or self.n_layers < 1 or self.d_ff < 1:
            raise ValueError("window, n_layers, d_ff must be >= 1")
        return self

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    def to_dict(self) -> dict:
        return {
            "d_model": self.d_model, "n_layers": self.n_layers, "d_ff": self.d_ff,
            "n_heads": self.n_heads, "dropout_p": self.dropout_p,
            "layernorm_eps": self.layernorm_eps, "window": self.window,
            "causal": self.causal, "positional": self.positional,
        }


def sinusoidal_table(length: int, dim: int) -> np.ndarray:
    """Classic sin/cos position table; handles odd dim by one extra sin."""
    pe = np.zeros((length, dim))
    pos = np.arange(length)[:, None].astype(float)
    div = np.exp(np.arange(0, dim, 2) * (-np.log(10000.0) / dim))
    pe[:, 0::2] = np.sin(pos * div)
    n_cos = pe[:, 1::2].shape[1]
    pe[:, 1::2] = np.cos(pos * div[:n_cos])
    return pe


def causal_mask(w: int) -> np.ndarray:
    """(w, w) additive mask: 0 at and below the diagonal, -1e9 above."""
    return np.triu(np.full((w, w), NEG_INF), k=1)


class MultiHeadAttention:
    def __init__(self, cfg: TransformerConfig, rng: np.random.Generator):
        d = cfg.d_model
        self.cfg = cfg
        self.wq = Linear(d, d, rng)
        # no key bias: softmax is invariant to a constant shift of every
        # score in a row, so a key bias would be unlearnable dead weight
        self.wk = Linear(d, d, rng, bias=False)
        self.wv = Linear(d, d, rng)
        self.wo = Linear(d, d, rng)

    def __call__(self, x: Tensor, mask: np.ndarray | None) -> Tensor:
        b, w, d = x.shape
        h, hd = self.cfg.n_heads, self.cfg.head_dim
        q = self.wq(x).reshape(b, w, h, hd).transpose(0, 2, 1, 3)
        k = self.wk(x).reshape(b, w, h, hd).transpose(0, 2, 1, 3)
        v = self.wv(x).reshape(b, w, h, hd).transpose(0, 2, 1, 3)
        scores = (q @ k.transpose(0, 1, 3, 2)) * (1.0 / np.sqrt(hd))
        if mask is not None:
            scores = scores + Tensor(mask)
        attn = softmax(scores, axis=-1)
        ctx = (attn @ v).transpose(0, 2, 1, 3).reshape(b, w, d)
        return self.wo(ctx)

    def parameters(self, prefix: str) -> dict:
        out = {}
        for name in ("wq", "wk", "wv", "wo"):
            out.update(getattr(self, name).parameters(f"{prefix}.{name}"))
        return out


class EncoderLayer:
    def __init__(self, cfg: TransformerConfig, rng: np.random.Generator):
        d = cfg.d_model
        self.cfg = cfg
        self.attn = MultiHeadAttention(cfg, rng)
        self.ff1 = Linear(d, cfg.d_ff, rng)
        self.ff2 = Linear(cfg.d_ff, d, rng)
        self.ln1_g = Tensor(np.ones(d), requires_grad=True)
        self.ln1_b = Tensor(np.zeros(d), requires_grad=True)
        self.ln2_g = Tensor(np.ones(d), requires_grad=True)
        self.ln2_b = Tensor(np.zeros(d), requires_grad=True)

    def __call__(self, x: Tensor, mask, drop_rng, training: bool) -> Tensor:
        eps, p = self.cfg.layernorm_eps, self.cfg.dropout_p
        a = dropout(self.attn(x, mask), p, drop_rng, training)
        x = layer_norm(x + a, self.ln1_g, self.ln1_b, eps)
        f = dropout(self.ff2(self.ff1(x).relu()), p, drop_rng, training)
        return layer_norm(x + f, self.ln2_g, self.ln2_b, eps)

    def parameters(self, prefix: str) -> dict:
        out = self.attn.parameters(f"{prefix}.attn")
        out.update(self.ff1.parameters(f"{prefix}.ff1"))
        out.update(self.ff2.parameters(f"{prefix}.ff2"))
        out[f"{prefix}.ln1.gain"] = self.ln1_g
        out[f"{prefix}.ln1.bias"] = self.ln1_b
        out[f"{prefix}.ln2.gain"] = self.ln2_g
        out[f"{prefix}.ln2.bias"] = self.ln2_b
        return out


class TransformerModel:
    """Stack of encoder layers + output head; maps (B, W, 15) -> (B, W, 15)."""

    kind = "transformer"

    def __init__(self, cfg: TransformerConfig | None = None, seed: int = 0):
        self.cfg = (cfg or TransformerConfig()).validate()
        rng = np.random.default_rng(seed)
        self.seed = seed
        self.layers = [EncoderLayer(self.cfg, rng) for _ in range(self.cfg.n_layers)]
        self.head = Linear(self.cfg.d_model, self.cfg.d_model, rng)
        self.drop_rng = np.random.default_rng(seed + 1)
        self._pe = sinusoidal_table(self.cfg.window, self.cfg.d_model)
        self._mask_cache: dict[int, np.ndarray] = {}

    def reseed_dropout(self, seed: int) -> None:
        self.drop_rng = np.random.default_rng(seed)

    def _mask(self, w: int):
        if not self.cfg.causal:
            return None
        if w not in self._mask_cache:
            self._mask_cache[w] = causal_mask(w)
        return self._mask_cache[w]

    def __call__(self, x, training: bool = False) -> Tensor:
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if x.ndim != 3 or x.shape[2] != self.cfg.d_model:
            raise ValueError(f"expected (B, W, {self.cfg.d_model}), got {x.shape}")
        w = x.shape[1]
        if w > self.cfg.window:
            raise ValueError(f"sequence length {w} exceeds configured window "
                             f"{self.cfg.window}")
        if self.cfg.positional == "sinusoidal":
            x = x + Tensor(self._pe[:w])
        mask = self._mask(w)
        for i, layer in enumerate(self.layers):
            x = layer(x, mask, self.drop_rng, training)
            if not np.all(np.isfinite(x.data)):
                raise FloatingPointError(f"non-finite activations in encoder layer {i}")
        return self.head(x)

    def parameters(self) -> dict:
        out = {}
        for i, layer in enumerate(self.layers):
            out.update(layer.parameters(f"layers.{i}"))
        out.update(self.head.parameters("head"))
        return out

    def num_params(self) -> int:
        return count_params(self.parameters())

    def config_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, **self.cfg.to_dict()}
