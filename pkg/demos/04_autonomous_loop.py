"""The 100 Hz autonomous loop, timed.

Replaces the scripted hand with a model policy: at every control step the
policy reads the follower's recent history and produces the next leader
command, closing the same bilateral loop the demonstrations were recorded
with.  This demo focuses on the loop mechanics and its latency budget;
pass a checkpoint path to watch a trained policy work (see the README for
the full training recipe).

    python3 demos/04_autonomous_loop.py [checkpoint.ckpt]
"""

import sys

import numpy as np

from bilab.config import WorkbenchConfig
from bilab.nn import TransformerConfig, TransformerModel
from bilab.nn.normalize import NormStats
from bilab.runtime.autonomous import run_autonomous_episode
from bilab.runtime.policy import ConstantPolicy, TransformerPolicy, policy_from_checkpoint

cfg = WorkbenchConfig()

if len(sys.argv) > 1:
    policy, meta = policy_from_checkpoint(sys.argv[1])
    print(f"== Trained policy from {sys.argv[1]} "
          f"(epoch {meta.get('epoch')}, val mse {meta.get('val_mse'):.2e}) ==")
else:
    # Untrained weights wave the arm uselessly but exercise the true
    # compute path, which is what the latency story is about.
    model = TransformerModel(TransformerConfig(window=100), seed=0)
    unit = NormStats(np.zeros(15), np.ones(15), np.zeros(15), np.ones(15))
    policy = TransformerPolicy(model, unit)
    print("== Untrained window-100 transformer (latency demo) ==")

result = run_autonomous_episode(cfg, policy, "tennis", seed=7000,
                                timeout_s=6.0)
stats = result.latency_stats_ms()
print(f"outcome: {result.status.stage.name}  steps: {len(result.episode)}")
print(f"policy step latency over {stats['n']} calls [ms]: "
      f"mean {stats['mean']:.2f}  p50 {stats['p50']:.2f}  "
      f"p99 {stats['p99']:.2f}  max {stats['max']:.2f}")
print("the 100 Hz loop leaves a 10 ms budget per step; the p99 above is "
      "the number the latency regression test guards")

print("\n== Constant baseline for scale ==")
frozen = run_autonomous_episode(cfg, ConstantPolicy(), "tennis", seed=7000,
                                timeout_s=6.0)
print(f"outcome: {frozen.status.stage.name} "
      f"(a policy that freezes the first observation goes nowhere; "
      f"unheld objects do not drift into the goal)")

print("\n== What the policy actually sees and says ==")
episode = result.episode
k = min(200, len(episode) - 1)
obs = episode.follower_theta[k], episode.follower_omega[k], episode.follower_tau[k]
cmd = episode.leader_theta[k + 1]
print(f"step {k}: follower theta {np.array2string(obs[0], precision=3)}")
print(f"         policy's leader theta {np.array2string(cmd, precision=3)}")
print("the policy's output stands in for the human hand: same interface, "
      "same bilateral law underneath")
