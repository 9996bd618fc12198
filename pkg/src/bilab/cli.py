"""Command-line entry points for the bilateral manipulation workbench.

Subcommands: collect, train, eval, replay, serve, ctl-tune, grad-check.
Every subcommand exits 0 on success and nonzero with a one-line diagnostic
on failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None,
                   help="INI config file (default: BILAB_CONFIG env var or built-ins)")


def _load_cfg(args):
    from .config import load_config
    return load_config(args.config)


def cmd_collect(args) -> int:
    from .runtime.collect import collect_demos
    cfg = _load_cfg(args)
    objects = [s.strip() for s in args.objects.split(",") if s.strip()]
    records = collect_demos(
        cfg, objects, args.per_object, args.out, base_seed=args.base_seed,
        progress=lambda r: print(f"  {r['path']}  {r['stage']:8} "
                                 f"steps={r['steps']}", flush=True))
    placed = sum(r["place"] for r in records)
    print(f"collected {len(records)} episodes to {args.out}; "
          f"{placed}/{len(records)} placed")
    return 0 if placed == len(records) else 1


def cmd_train(args) -> int:
    from .nn import LstmConfig, LstmModel, TransformerConfig, TransformerModel
    from .training import TrainConfig, build_dataset, load_many, train
    cfg = _load_cfg(args)
    paths = load_many(args.demos)
    if not paths:
        print(f"no episode files in {args.demos}", file=sys.stderr)
        return 1
    ds = build_dataset(paths, window=args.window, stride=args.stride,
                       seed=args.split_seed)
    print(ds.report.summary())
    print(f"windows: {ds.n_train} train / {ds.n_val} val")

    if args.model == "transformer":
        model = TransformerModel(TransformerConfig(window=args.window),
                                 seed=args.model_seed)
    else:
        model = LstmModel(LstmConfig(), seed=args.model_seed)
    tc = TrainConfig(lr=args.lr, batch_size=args.batch_size,
                     max_epochs=args.epochs, patience=args.patience,
                     seed=args.seed, grad_clip=args.grad_clip)
    result = train(model, ds, tc, args.out, checkpoint_name=args.checkpoint_name,
                   progress=lambda r: print(
                       f"  epoch {r.epoch}: train {r.train_mse:.6f} "
                       f"val {r.val_mse:.6f} ({r.wall_seconds:.1f}s)", flush=True))
    print(f"{result.stop_reason}; best val {result.best_val:.6f} at epoch "
          f"{result.best_epoch}; checkpoint {result.checkpoint_path}")
    return 0


def cmd_eval(args) -> int:
    from .evaluate import eval_success_rates
    cfg = _load_cfg(args)
    policies = {}
    for item in args.checkpoint:
        if "=" not in item:
            print(f"--checkpoint wants NAME=PATH, got {item!r}", file=sys.stderr)
            return 1
        name, path = item.split("=", 1)
        policies[name] = path
    objects = ([s.strip() for s in args.objects.split(",") if s.strip()]
               if args.objects else None)
    report = eval_success_rates(
        cfg, policies, objects=objects, trials_per_cell=args.trials,
        base_seed=args.base_seed, include_baseline=not args.no_baseline,
        progress=lambda cell, seed, res: print(
            f"  {cell.model}/{cell.object} seed {seed}: "
            f"{res.status.stage.name}", flush=True))
    nd, txt = report.write(args.out)
    print(report.table())
    print(f"report: {nd} and {txt}")
    for cell in report.cells:
        if not cell.chain_holds():
            print(f"stage-flag chain violated in cell ({cell.model}, {cell.object})",
                  file=sys.stderr)
            return 1
    return 0


def cmd_replay(args) -> int:
    from .episodes import load_episode
    from .runtime.collect import run_demo_episode
    cfg = _load_cfg(args)
    recorded = load_episode(args.episode)
    meta = recorded.meta
    if meta.get("source") != "scripted":
        print(f"{args.episode}: only scripted episodes replay deterministically "
              f"(source={meta.get('source')!r})", file=sys.stderr)
        return 1
    rerun, _world = run_demo_episode(cfg, meta["object"], seed=meta["seed"])
    fields = ["t", "leader_theta", "leader_omega", "leader_tau",
              "follower_theta", "follower_omega", "follower_tau"]
    if len(rerun) != len(recorded):
        print(f"replay length {len(rerun)} != recorded {len(recorded)}",
              file=sys.stderr)
        return 1
    for f in fields:
        a, b = getattr(recorded, f), getattr(rerun, f)
        if not np.array_equal(a, b):
            i = int(np.argwhere(a != b)[0][0])
            print(f"replay mismatch in {f} at step {i}", file=sys.stderr)
            return 1
    print(f"replay of {args.episode}: {len(rerun)} steps bit-identical")
    return 0


def cmd_serve(args) -> int:
    from .teleop import TeleopServer
    cfg = _load_cfg(args)
    server = TeleopServer(cfg, args.out, host=args.host, port=args.port,
                          seed=args.seed, realtime=not args.lockstep)
    server.start()
    print(f"teleop server on {args.host}:{server.port} "
          f"({'lockstep' if args.lockstep else 'realtime'}); Ctrl-C to stop")
    try:
        server.serve_forever()
    finally:
        server.shutdown()
    return 0


def cmd_ctl_tune(args) -> int:
    from dataclasses import replace
    from .runtime.collect import run_demo_episode
    cfg = _load_cfg(args)
    muls = [float(x) for x in args.scale.split(",")]
    print(f"{'kp':>8}{'kd':>8}{'kf':>6}  {'max|e|':>10}  {'force_ratio':>12}  outcome")
    worst = 0
    for m in muls:
        gains = replace(cfg.gains, kp=cfg.gains.kp * m, kd=cfg.gains.kd * np.sqrt(m))
        trial_cfg = replace(cfg, gains=gains)
        episode, world = run_demo_episode(trial_cfg, args.object, seed=None)
        e = np.abs(episode.leader_theta - episode.follower_theta).max()
        s = np.abs(episode.leader_tau + episode.follower_tau)
        denom = np.abs(episode.follower_tau)
        mask = denom > 0.05
        ratio = float((s[mask] / denom[mask]).max()) if mask.any() else 0.0
        outcome = world.status.stage.name
        print(f"{gains.kp:>8.1f}{gains.kd:>8.2f}{gains.kf:>6.2f}  {e:>10.2e}  "
              f"{ratio:>12.3f}  {outcome}")
        if outcome != "PLACED":
            worst = 1
    return worst


def cmd_grad_check(args) -> int:
    from .nn import (LstmConfig, LstmModel, TransformerConfig, TransformerModel,
                     grad_check)
    from .nn.tensor import Tensor, mse_loss
    rng = np.random.default_rng(args.seed)
    x = rng.normal(size=(2, args.window, 15))
    y = rng.normal(size=(2, args.window, 15))
    failures = 0
    kinds = ["transformer", "lstm"] if args.model == "both" else [args.model]
    for kind in kinds:
        if kind == "transformer":
            model = TransformerModel(TransformerConfig(window=args.window),
                                     seed=args.seed)
        else:
            model = LstmModel(LstmConfig(), seed=args.seed)

        def loss_fn():
            out = model(Tensor(x), training=False)
            pred = out[0] if isinstance(out, tuple) else out
            return mse_loss(pred, Tensor(y))

        report = grad_check(loss_fn, model.parameters(), n_samples=args.samples,
                            seed=args.seed)
        print(f"{kind}: {report.summary()}")
        failures += 0 if report.passed else 1
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bilab",
        description="Bilateral teleoperation and imitation learning workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="record scripted bilateral demonstrations")
    _add_config_flag(p)
    p.add_argument("--out", required=True)
    p.add_argument("--objects", default="tennis,soccer")
    p.add_argument("--per-object", type=int, default=25)
    p.add_argument("--base-seed", type=int, default=100)
    p.set_defaults(fn=cmd_collect)

    p = sub.add_parser("train", help="fit a model on recorded episodes")
    _add_config_flag(p)
    p.add_argument("--demos", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", choices=("transformer", "lstm"), default="transformer")
    p.add_argument("--checkpoint-name", default="model.ckpt")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--patience", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-seed", type=int, default=1)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--grad-clip", type=float, default=0.0)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="success-rate table over seeded trials")
    _add_config_flag(p)
    p.add_argument("--checkpoint", action="append", default=[],
                   metavar="NAME=PATH", help="repeatable")
    p.add_argument("--out", required=True)
    p.add_argument("--objects", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--no-baseline", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("replay", help="re-run a scripted episode and verify bits")
    _add_config_flag(p)
    p.add_argument("episode")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("serve", help="run the teleoperation socket service")
    _add_config_flag(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--out", default="teleop_episodes")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lockstep", action="store_true",
                   help="advance one control step per inbound message")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("ctl-tune", help="sweep position-gain scales and report"
                                        " tracking/force metrics")
    _add_config_flag(p)
    p.add_argument("--object", default="tennis")
    p.add_argument("--scale", default="0.5,1.0,2.0",
                   help="comma-separated kp multipliers")
    p.set_defaults(fn=cmd_ctl_tune)

    p = sub.add_parser("grad-check", help="numeric vs analytic gradients")
    p.add_argument("--model", choices=("transformer", "lstm", "both"),
                   default="both")
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_grad_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130
    except Exception as err:  # one-line diagnostic, nonzero exit
        print(f"bilab {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
