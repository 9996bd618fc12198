"""Stacked LSTM baseline: 15 -> 6 x 400 -> linear head -> 15.

The input projection runs per time step (never precomputed for the whole
sequence), so feeding a sequence in two chunks with carried (h, c) state
produces bit-identical outputs to feeding it whole.  That property is what
lets the 100 Hz policy stream one step at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layers import Linear, count_params
from .tensor import Tensor, concat


@dataclass(frozen=True)
class LstmConfig:
    input_dim: int = 15
    hidden: int = 400
    layers: int = 6
    output_dim: int = 15
    tbptt_window: int = 100

    def validate(self) -> "LstmConfig":
        if min(self.input_dim, self.hidden, self.layers, self.output_dim) < 1:
            raise ValueError("all LSTM dimensions must be >= 1")
        return self

    def to_dict(self) -> dict:
        return {"input_dim": self.input_dim, "hidden": self.hidden,
                "layers": self.layers, "output_dim": self.output_dim,
                "tbptt_window": self.tbptt_window}


class LstmLayer:
    """One LSTM layer; one shared bias per layer, gate order (i, f, g, o).

    The forget-gate bias section starts at 1.0 so early training does not
    wash out the cell state.
    """

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        bound = 1.0 / np.sqrt(hidden)
        self.w_ih = Tensor(rng.uniform(-bound, bound, (in_dim, 4 * hidden)),
                           requires_grad=True)
        self.w_hh = Tensor(rng.uniform(-bound, bound, (hidden, 4 * hidden)),
                           requires_grad=True)
        bias = np.zeros(4 * hidden)
        bias[hidden:2 * hidden] = 1.0
        self.bias = Tensor(bias, requires_grad=True)
        self.hidden = hidden

    def step(self, x: Tensor, h: Tensor, c: Tensor):
        n = self.hidden
        gates = x @ self.w_ih + h @ self.w_hh + self.bias
        i = gates[:, 0 * n:1 * n].sigmoid()
        f = gates[:, 1 * n:2 * n].sigmoid()
        g = gates[:, 2 * n:3 * n].tanh()
        o = gates[:, 3 * n:4 * n].sigmoid()
        c_new = f * c + i * g
        h_new = o * c_new.tanh()
        return h_new, c_new

    def parameters(self, prefix: str) -> dict:
        return {f"{prefix}.w_ih": self.w_ih, f"{prefix}.w_hh": self.w_hh,
                f"{prefix}.bias": self.bias}


class LstmModel:
    """Maps (B, W, 15) -> (B, W, 15); optionally carries recurrent state."""

    kind = "lstm"

    def __init__(self, cfg: LstmConfig | None = None, seed: int = 0):
        self.cfg = (cfg or LstmConfig()).validate()
        rng = np.random.default_rng(seed)
        self.seed = seed
        self.cells = []
        in_dim = self.cfg.input_dim
        for _ in range(self.cfg.layers):
            self.cells.append(LstmLayer(in_dim, self.cfg.hidden, rng))
            in_dim = self.cfg.hidden
        self.head = Linear(self.cfg.hidden, self.cfg.output_dim, rng)

    def initial_state(self, batch: int):
        z = lambda: Tensor(np.zeros((batch, self.cfg.hidden)))
        return [(z(), z()) for _ in range(self.cfg.layers)]

    def __call__(self, x, training: bool = False, state=None):
        """Returns (predictions, final_state).  `training` is accepted for
        interface parity; the LSTM has no dropout."""
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if x.ndim != 3 or x.shape[2] != self.cfg.input_dim:
            raise ValueError(f"expected (B, W, {self.cfg.input_dim}), got {x.shape}")
        b, w, _ = x.shape
        if state is None:
            state = self.initial_state(b)
        outs = []
        for t in range(w):
            inp = x[:, t, :]
            new_state = []
            for cell, (h, c) in zip(self.cells, state):
                h, c = cell.step(inp, h, c)
                new_state.append((h, c))
                inp = h
            state = new_state
            outs.append(self.head(inp).reshape(b, 1, self.cfg.output_dim))
        y = concat(outs, axis=1)
        if not np.all(np.isfinite(y.data)):
            raise FloatingPointError("non-finite LSTM outputs")
        return y, state

    @staticmethod
    def detach_state(state):
        return [(h.detach(), c.detach()) for h, c in state]

    def parameters(self) -> dict:
        out = {}
        for i, cell in enumerate(self.cells):
            out.update(cell.parameters(f"cells.{i}"))
        out.update(self.head.parameters("head"))
        return out

    def num_params(self) -> int:
        return count_params(self.parameters())

    def config_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, **self.cfg.to_dict()}
