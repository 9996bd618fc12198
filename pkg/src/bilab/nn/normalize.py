"""Per-channel z-score statistics for the 15-dim state vectors.

Computed over the training split only, stored with every checkpoint so a
deployed model always normalizes exactly as it was trained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STD_FLOOR = 1e-6


@dataclass(frozen=True)
class NormStats:
    input_mean: np.ndarray
    input_std: np.ndarray
    target_mean: np.ndarray
    target_std: np.ndarray

    def __post_init__(self):
        for name in ("input_mean", "input_std", "target_mean", "target_std"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
        if np.any(self.input_std <= 0) or np.any(self.target_std <= 0):
            raise ValueError("normalization std must be strictly positive")

    @classmethod
    def fit(cls, inputs: np.ndarray, targets: np.ndarray) -> "NormStats":
        """inputs/targets: (N, C) stacked vectors from the training split."""
        def stats(a):
            a = a.reshape(-1, a.shape[-1])
            return a.mean(axis=0), np.maximum(a.std(axis=0), STD_FLOOR)
        im, istd = stats(np.asarray(inputs, dtype=float))
        tm, tstd = stats(np.asarray(targets, dtype=float))
        return cls(im, istd, tm, tstd)

    def normalize_input(self, x: np.ndarray) -> np.ndarray:
        return (x - self.input_mean) / self.input_std

    def normalize_target(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / self.target_std

    def denormalize_target(self, y: np.ndarray) -> np.ndarray:
        return y * self.target_std + self.target_mean

    def to_dict(self) -> dict:
        return {"input_mean": self.input_mean.tolist(),
                "input_std": self.input_std.tolist(),
                "target_mean": self.target_mean.tolist(),
                "target_std": self.target_std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(np.array(d["input_mean"]), np.array(d["input_std"]),
                   np.array(d["target_mean"]), np.array(d["target_std"]))

    @classmethod
    def identity(cls, dim: int = 15) -> "NormStats":
        one = np.ones(dim)
        zero = np.zeros(dim)
        return cls(zero, one, zero.copy(), one.copy())
