"""Inference-time policies: from the follower's recent states, produce the
leader state expected one control period later.

All policies share one contract: predict(follower_state_15) -> leader_state_15
in physical units. Normalization happens inside, using the statistics stored
with the checkpoint.
"""

from __future__ import annotations

import numpy as np

from ..nn.checkpoint import load_checkpoint
from ..nn.normalize import NormStats
from ..nn.tensor import Tensor

STATE_DIM = 15


class HistoryBuffer:
    """Fixed-length window of recent states, oldest first, newest last.

    Until enough states arrive the window is front-padded by repeating the
    oldest entry, so reads always return the full length.
    """

    def __init__(self, window: int):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self._rows: list[np.ndarray] = []

    def reset(self) -> None:
        self._rows.clear()

    def push(self, state: np.ndarray) -> None:
        state = np.asarray(state, dtype=float).reshape(-1)
        self._rows.append(state.copy())
        if len(self._rows) > self.window:
            self._rows.pop(0)

    def __len__(self) -> int:
        return len(self._rows)

    def as_array(self) -> np.ndarray:
        if not self._rows:
            raise ValueError("history buffer is empty")
        pad = self.window - len(self._rows)
        rows = [self._rows[0]] * pad + self._rows
        return np.stack(rows, axis=0)


class TransformerPolicy:
    """Sliding-window inference: rerun the encoder on the padded window and
    take the final output row."""

    kind = "transformer"

    def __init__(self, model, norm: NormStats):
        self.model = model
        self.norm = norm
        self.history = HistoryBuffer(model.cfg.window)

    def reset(self) -> None:
        self.history.reset()

    def predict(self, follower_state: np.ndarray) -> np.ndarray:
        self.history.push(self.norm.normalize_input(follower_state))
        x = self.history.as_array()[None, :, :]
        y = self.model(Tensor(x), training=False)
        return self.norm.denormalize_target(y.data[0, -1])


class LstmPolicy:
    """Stateful streaming inference: one timestep per call, hidden state
    carried across calls and detached so no graph accumulates."""

    kind = "lstm"

    def __init__(self, model, norm: NormStats):
        self.model = model
        self.norm = norm
        self.state = None

    def reset(self) -> None:
        self.state = None

    def predict(self, follower_state: np.ndarray) -> np.ndarray:
        x = self.norm.normalize_input(np.asarray(follower_state, dtype=float))
        y, state = self.model(Tensor(x[None, None, :]), training=False,
                              state=self.state)
        self.state = self.model.detach_state(state)
        return self.norm.denormalize_target(y.data[0, -1])


class ConstantPolicy:
    """Non-policy baseline: the same vector every step, regardless of input."""

    kind = "constant"

    def __init__(self, value: np.ndarray | None = None):
        self.value = (np.zeros(STATE_DIM) if value is None
                      else np.asarray(value, dtype=float).reshape(STATE_DIM))

    def reset(self) -> None:
        pass

    def predict(self, follower_state: np.ndarray) -> np.ndarray:
        return self.value.copy()


class EchoPolicy:
    """Returns the follower's own state as the leader prediction. With zero
    external force this is a fixed point: the position and velocity error
    terms vanish and the follower holds still."""

    kind = "echo"

    def reset(self) -> None:
        pass

    def predict(self, follower_state: np.ndarray) -> np.ndarray:
        return np.asarray(follower_state, dtype=float).copy()


def policy_from_checkpoint(path) -> tuple[object, dict]:
    """Load a checkpoint and wrap its model in the matching policy.

    Returns (policy, checkpoint meta).
    """
    model, norm, meta = load_checkpoint(path)
    if model.kind == "transformer":
        return TransformerPolicy(model, norm), meta
    if model.kind == "lstm":
        return LstmPolicy(model, norm), meta
    raise ValueError(f"no policy wrapper for model kind {model.kind!r}")


__all__ = ["STATE_DIM", "HistoryBuffer", "TransformerPolicy", "LstmPolicy",
           "ConstantPolicy", "EchoPolicy", "policy_from_checkpoint"]
