"""From raw episodes to a training set.

Records a handful of scripted demonstrations, reloads them from disk, and
walks the bookkeeping: 30 numbers per step (2 arms x 3 signals x 5
joints), overlapping windows per episode, an episode-level train/val
split, and whitening statistics computed on the training part only.
"""

import tempfile
from pathlib import Path

from bilab.config import WorkbenchConfig
from bilab.episodes import load_episode
from bilab.runtime.collect import collect_demos
from bilab.training import build_dataset, load_many

cfg = WorkbenchConfig()
tmp = Path(tempfile.mkdtemp(prefix="bilab_demo_"))

print("== Recording 4 scripted demonstrations ==")
records = collect_demos(cfg, ["tennis", "soccer"], 2, tmp, base_seed=100)
for r in records:
    print(f"  {Path(r['path']).name}: {r['steps']} steps, stage {r['stage']}")

print("\n== One episode up close ==")
ep = load_episode(records[0]["path"])
print(f"file: {Path(records[0]['path']).name}")
print(f"length {len(ep)} steps at 100 Hz, 30 channels per step")
print(f"meta: object={ep.meta['object']} seed={ep.meta['seed']} "
      f"outcome={ep.meta['outcome']['stage']}")
print("channel order per arm: theta x5, omega x5, tau x5  (leader then "
      "follower)")

print("\n== Windowing ==")
window, stride = 100, 10
ds = build_dataset(load_many(tmp), window=window, stride=stride, seed=0)
print(ds.report.summary())
print("inputs are the follower's 15 channels; targets are the leader's 15 "
      "channels one step later (what the guiding hand did next)")
n = records[0]["steps"]
n_windows = (n - window - 1) // stride + 1
print(f"one {n}-step episode yields {n_windows} windows at window={window}, "
      f"stride={stride} (the +1 target shift costs one start)")
print(f"split by episode: {len(ds.train_episode_ids)} train episodes "
      f"({ds.n_train} windows), {len(ds.val_episode_ids)} val episodes "
      f"({ds.n_val} windows)")
print("no window ever straddles two episodes, and no episode appears in "
      "both splits")

print("\n== Normalization ==")
print("input mean (first 5 of 15 dims):",
      ", ".join(f"{v:+.3f}" for v in ds.norm.input_mean[:5]))
print("input std  (first 5 of 15 dims):",
      ", ".join(f"{v:+.3f}" for v in ds.norm.input_std[:5]))
print("statistics come from training windows only; validation and later "
      "deployment reuse them unchanged (they ride inside the checkpoint)")
