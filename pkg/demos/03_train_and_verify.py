"""Train a small model and trust the gradients.

Fits a short-window transformer on a few demonstrations, then runs the
two verification layers that guard the training stack: a finite-difference
gradient check on both architectures and a checkpoint round-trip.  Takes
a couple of minutes; the full-scale recipe is in the README.
"""

import tempfile
from pathlib import Path

import numpy as np

from bilab.config import WorkbenchConfig
from bilab.nn import (
    LstmConfig,
    LstmModel,
    TransformerConfig,
    TransformerModel,
    grad_check,
    load_checkpoint,
    save_checkpoint,
)
from bilab.nn.tensor import Tensor, mse_loss
from bilab.runtime.collect import collect_demos
from bilab.training import TrainConfig, build_dataset, load_many, train

cfg = WorkbenchConfig()
tmp = Path(tempfile.mkdtemp(prefix="bilab_demo_"))

print("== Gradient check (both architectures, window 8) ==")
rng = np.random.default_rng(0)
x, y = rng.normal(size=(2, 8, 15)), rng.normal(size=(2, 8, 15))
for name, model in (
    ("transformer", TransformerModel(TransformerConfig(window=8), seed=0)),
    ("lstm", LstmModel(LstmConfig(), seed=0)),
):
    def loss_fn():
        out = model(Tensor(x), training=False)
        pred = out[0] if isinstance(out, tuple) else out
        return mse_loss(pred, Tensor(y))

    report = grad_check(loss_fn, model.parameters(), n_samples=60, seed=0)
    print(f"  {name}: {report.summary()}")

print("\n== Recording 4 demonstrations ==")
collect_demos(cfg, ["tennis", "soccer"], 2, tmp, base_seed=100)

print("\n== Training a window-40 transformer for 12 epochs ==")
ds = build_dataset(load_many(tmp), window=40, stride=10, seed=0)
print(f"windows: {ds.n_train} train / {ds.n_val} val")
model = TransformerModel(TransformerConfig(window=40), seed=1)
result = train(model, ds, TrainConfig(lr=1e-3, max_epochs=12, patience=12),
               tmp / "run",
               progress=lambda r: print(
                   f"  epoch {r.epoch:2d}: train {r.train_mse:.5f} "
                   f"val {r.val_mse:.5f} ({r.wall_seconds:.1f}s)"))
print(f"{result.stop_reason}; best val {result.best_val:.5f} at epoch "
      f"{result.best_epoch}")

print("\n== Checkpoint round-trip ==")
loaded, norm, meta = load_checkpoint(result.checkpoint_path)
print(f"checkpoint holds the best-validation epoch ({meta['epoch']}, "
      f"val {meta['val_mse']:.5f}), which need not be the last one trained")
again = tmp / "again.ckpt"
save_checkpoint(again, loaded, norm, meta=meta)
identical = Path(result.checkpoint_path).read_bytes() == again.read_bytes()
print(f"save(load(ckpt)) reproduces the file byte for byte: {identical}")
print("normalization stats travel inside the checkpoint, so a loaded "
      "policy needs no side files")
