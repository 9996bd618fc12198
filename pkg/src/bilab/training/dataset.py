"""Sliding-window dataset over recorded bilateral episodes.

Each training sample pairs a window of follower rows with the leader rows
one step later: the model sees what the follower did and must say what the
leader (the hand guiding it) did next. Windows never cross an episode
boundary, and normalization statistics come from the training split only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..episodes import Episode, load_episode
from ..nn.normalize import NormStats

STATE_DIM = 15


@dataclass
class DatasetReport:
    """Size accounting for a loaded corpus."""

    episodes: int
    skipped: int
    steps: int
    joints: int = 5
    channels: int = 3
    arms: int = 2

    @property
    def data_points(self) -> int:
        return self.steps * self.joints * self.channels * self.arms

    def summary(self) -> str:
        return (f"{self.episodes} episodes ({self.skipped} skipped), "
                f"{self.steps} steps, {self.data_points} scalar data points")


@dataclass
class SequenceDataset:
    """Windowed episodes split by episode into train and validation parts."""

    window: int
    stride: int
    inputs: list[np.ndarray]
    targets: list[np.ndarray]
    train_windows: list[tuple[int, int]]
    val_windows: list[tuple[int, int]]
    norm: NormStats
    report: DatasetReport
    train_episode_ids: list[int] = field(default_factory=list)
    val_episode_ids: list[int] = field(default_factory=list)

    def sample(self, which: str, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Return one normalized (input, target) window pair, each (W, 15)."""
        ep, start = (self.train_windows if which == "train" else self.val_windows)[index]
        x = self.inputs[ep][start:start + self.window]
        y = self.targets[ep][start + 1:start + 1 + self.window]
        return self.norm.normalize_input(x), self.norm.normalize_target(y)

    def batch(self, which: str, order: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Stack the windows selected by ``order`` into (B, W, 15) arrays."""
        xs = np.empty((len(order), self.window, STATE_DIM))
        ys = np.empty((len(order), self.window, STATE_DIM))
        for row, idx in enumerate(order):
            xs[row], ys[row] = self.sample(which, int(idx))
        return xs, ys

    @property
    def n_train(self) -> int:
        return len(self.train_windows)

    @property
    def n_val(self) -> int:
        return len(self.val_windows)


def window_starts(n_rows: int, window: int, stride: int) -> range:
    """Valid window start offsets for an episode of ``n_rows`` rows.

    A start s needs rows s..s+W-1 for the input and s+1..s+W for the
    target, so s can run up to n_rows - window - 1. With stride 1 that
    gives n_rows - window windows.
    """
    last = n_rows - window - 1
    if last < 0:
        return range(0)
    return range(0, last + 1, stride)


def split_episode_ids(n_episodes: int, train_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    """Deterministic episode-level split. At least one episode goes to train."""
    order = np.random.default_rng(seed).permutation(n_episodes)
    n_train = max(1, int(round(train_fraction * n_episodes)))
    n_train = min(n_train, n_episodes)
    train = sorted(int(i) for i in order[:n_train])
    val = sorted(int(i) for i in order[n_train:])
    return train, val


def build_dataset(paths: list[str | Path], window: int = 100, stride: int = 1,
                  train_fraction: float = 0.8, seed: int = 0) -> SequenceDataset:
    """Load episode files into a windowed, normalized, split dataset.

    Episodes too short to yield a single window (fewer than window + 1
    rows) are skipped with a warning. Unreadable files raise with the
    file name and offending line so the bad recording can be found.
    """
    if not paths:
        raise ValueError("no episode files given")
    if window < 1:
        raise ValueError("window must be >= 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    inputs: list[np.ndarray] = []
    targets: list[np.ndarray] = []
    steps = 0
    skipped = 0
    for path in paths:
        episode = load_episode(path)
        n = episode.t.shape[0]
        if n < window + 1:
            skipped += 1
            warnings.warn(f"{path}: only {n} rows, need {window + 1}; episode skipped",
                          stacklevel=2)
            continue
        inputs.append(episode.follower_rows())
        targets.append(episode.leader_rows())
        steps += n

    if not inputs:
        raise ValueError("no usable episodes: all inputs were too short")

    train_ids, val_ids = split_episode_ids(len(inputs), train_fraction, seed)
    train_windows = [(ep, s) for ep in train_ids
                     for s in window_starts(inputs[ep].shape[0], window, stride)]
    val_windows = [(ep, s) for ep in val_ids
                   for s in window_starts(inputs[ep].shape[0], window, stride)]
    if not train_windows:
        raise ValueError("training split produced no windows")

    norm = NormStats.fit(
        np.concatenate([inputs[i] for i in train_ids], axis=0),
        np.concatenate([targets[i] for i in train_ids], axis=0),
    )
    report = DatasetReport(episodes=len(inputs), skipped=skipped, steps=steps)
    return SequenceDataset(window=window, stride=stride, inputs=inputs,
                           targets=targets, train_windows=train_windows,
                           val_windows=val_windows, norm=norm, report=report,
                           train_episode_ids=train_ids, val_episode_ids=val_ids)


def load_many(directory: str | Path, pattern: str = "*.csv") -> list[Path]:
    """Episode CSV paths under a directory, sorted by name."""
    files = sorted(Path(directory).glob(pattern))
    return [p for p in files if not p.name.endswith(".meta.json")]


__all__ = ["DatasetReport", "SequenceDataset", "build_dataset",
           "window_starts", "split_episode_ids", "load_many", "STATE_DIM"]
