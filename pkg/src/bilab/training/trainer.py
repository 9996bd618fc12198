"""Minibatch training loop with early stopping and run logging.

The loop is deterministic for a given (model seed, train seed) pair:
batch order comes from one seeded generator and the model's dropout
stream is reseeded before the first epoch, so reruns produce identical
run logs (wall time aside) and byte-identical best checkpoints.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..nn.checkpoint import save_checkpoint
from ..nn.tensor import Tensor, mse_loss
from ..nn.layers import clip_grad_norm
from .adam import Adam
from .dataset import SequenceDataset


@dataclass
class TrainConfig:
    lr: float = 1e-4
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0
    grad_clip: float = 0.0

    def validate(self) -> "TrainConfig":
        if self.lr <= 0:
            raise ValueError("lr must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        return self

    def to_dict(self) -> dict:
        return {"lr": self.lr, "batch_size": self.batch_size,
                "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
                "max_epochs": self.max_epochs, "patience": self.patience,
                "seed": self.seed, "grad_clip": self.grad_clip}


@dataclass
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float
    wall_seconds: float


@dataclass
class TrainResult:
    checkpoint_path: Path
    log_path: Path
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_val: float = float("inf")
    stop_reason: str = ""


def _forward(model, x: np.ndarray, training: bool) -> Tensor:
    """Uniform forward for both model kinds (the LSTM also returns state)."""
    out = model(Tensor(x), training=training)
    return out[0] if isinstance(out, tuple) else out


def evaluate_mse(model, dataset: SequenceDataset, which: str,
                 batch_size: int) -> float:
    """Mean squared error over every window of one split, without dropout."""
    windows = dataset.train_windows if which == "train" else dataset.val_windows
    if not windows:
        return float("nan")
    total = 0.0
    count = 0
    for lo in range(0, len(windows), batch_size):
        order = np.arange(lo, min(lo + batch_size, len(windows)))
        x, y = dataset.batch(which, order)
        pred = _forward(model, x, training=False)
        total += float(np.mean((pred.data - y) ** 2)) * len(order)
        count += len(order)
    return total / count


def train(model, dataset: SequenceDataset, cfg: TrainConfig, out_dir: str | Path,
          checkpoint_name: str = "model.ckpt", log_name: str = "train_log.ndjson",
          progress=None) -> TrainResult:
    """Fit the model and keep the checkpoint with the lowest validation MSE.

    Writes one NDJSON line per epoch to the run log. Training aborts on a
    non-finite loss or a rejected optimizer step; in that case the best
    checkpoint saved so far is kept and the result says why it stopped.
    When the dataset has no validation windows the training MSE stands in
    for validation in both the log and the checkpoint choice.
    """
    cfg.validate()
    if dataset.n_train == 0:
        raise ValueError("dataset has no training windows")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt_path = out_dir / checkpoint_name
    log_path = out_dir / log_name

    if hasattr(model, "reseed_dropout"):
        model.reseed_dropout(cfg.seed + 1)
    params = model.parameters()
    opt = Adam(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    rng = np.random.default_rng(cfg.seed)
    result = TrainResult(checkpoint_path=ckpt_path, log_path=log_path)
    since_best = 0

    def save_best(epoch: int, val: float) -> None:
        meta = {"epoch": epoch, "val_mse": val, "train_config": cfg.to_dict(),
                "train_windows": dataset.n_train, "val_windows": dataset.n_val}
        save_checkpoint(ckpt_path, model, norm_stats=dataset.norm, meta=meta)

    with open(log_path, "w") as log:
        for epoch in range(cfg.max_epochs):
            t0 = time.perf_counter()
            order = rng.permutation(dataset.n_train)
            losses = []
            aborted = None
            for lo in range(0, dataset.n_train, cfg.batch_size):
                x, y = dataset.batch("train", order[lo:lo + cfg.batch_size])
                pred = _forward(model, x, training=True)
                loss = mse_loss(pred, Tensor(y))
                value = float(loss.data)
                if not np.isfinite(value):
                    aborted = f"diverged: non-finite loss in epoch {epoch}"
                    break
                opt.zero_grad()
                loss.backward()
                if cfg.grad_clip > 0:
                    clip_grad_norm(params, cfg.grad_clip)
                try:
                    opt.step()
                except FloatingPointError as err:
                    aborted = f"diverged: {err}"
                    break
                losses.append(value)
            if aborted is not None:
                result.stop_reason = aborted
                break

            train_mse = float(np.mean(losses))
            val_mse = evaluate_mse(model, dataset, "val", cfg.batch_size)
            score = train_mse if np.isnan(val_mse) else val_mse
            wall = time.perf_counter() - t0
            record = EpochRecord(epoch=epoch, train_mse=train_mse,
                                 val_mse=val_mse, wall_seconds=wall)
            result.history.append(record)
            log.write(json.dumps({"epoch": epoch, "train_mse": train_mse,
                                  "val_mse": val_mse,
                                  "wall_seconds": round(wall, 3)}) + "\n")
            log.flush()
            if progress is not None:
                progress(record)

            if score < result.best_val:
                result.best_val = score
                result.best_epoch = epoch
                since_best = 0
                save_best(epoch, score)
            else:
                since_best += 1
                if since_best >= cfg.patience:
                    result.stop_reason = f"early stop: no improvement for {cfg.patience} epochs"
                    break
        else:
            result.stop_reason = "max_epochs reached"

    if result.best_epoch < 0:
        raise RuntimeError(f"no epoch completed; {result.stop_reason}")
    return result


__all__ = ["TrainConfig", "EpochRecord", "TrainResult", "train", "evaluate_mse"]
