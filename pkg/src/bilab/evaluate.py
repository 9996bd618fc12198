"""Success-rate evaluation: run policies through seeded autonomous trials
and tally pick/move/place stage flags per (model, object) cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import WorkbenchConfig
from .runtime.autonomous import run_autonomous_episode
from .runtime.policy import ConstantPolicy, policy_from_checkpoint


@dataclass
class EvalCell:
    """Tallies for one (model, object) combination."""

    model: str
    object: str
    trained: bool
    trials: int = 0
    pick: int = 0
    move: int = 0
    place: int = 0
    faults: int = 0
    seeds: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    def add_trial(self, seed: int, status, n_steps: int, fault) -> None:
        self.trials += 1
        self.seeds.append(seed)
        self.steps.append(n_steps)
        self.pick += int(status.pick_succeeded)
        self.move += int(status.move_succeeded)
        self.place += int(status.place_succeeded)
        self.faults += int(fault is not None)

    def chain_holds(self) -> bool:
        return self.place <= self.move <= self.pick <= self.trials

    def as_dict(self) -> dict:
        return {"model": self.model, "object": self.object,
                "trained": self.trained, "trials": self.trials,
                "pick": self.pick, "move": self.move, "place": self.place,
                "faults": self.faults, "seeds": list(self.seeds),
                "steps": list(self.steps)}


@dataclass
class EvalReport:
    cells: list
    config_echo: dict = field(default_factory=dict)

    def cell(self, model: str, obj: str) -> EvalCell:
        for c in self.cells:
            if c.model == model and c.object == obj:
                return c
        raise KeyError(f"no cell ({model}, {obj})")

    def table(self) -> str:
        """Human-readable success table, one row per cell."""
        lines = [f"{'model':<14}{'object':<14}{'trained':<9}"
                 f"{'pick':>7}{'move':>7}{'place':>8}{'faults':>8}"]
        lines.append("-" * len(lines[0]))
        for c in self.cells:
            n = c.trials
            lines.append(f"{c.model:<14}{c.object:<14}"
                         f"{('yes' if c.trained else 'no'):<9}"
                         f"{c.pick:>4}/{n:<2}{c.move:>4}/{n:<2}"
                         f"{c.place:>5}/{n:<2}{c.faults:>7}")
        return "\n".join(lines)

    def to_records(self) -> list:
        return [c.as_dict() for c in self.cells]

    def write(self, out_dir, stem: str = "eval_report") -> tuple:
        """Write NDJSON records plus the rendered table; returns both paths."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        nd = out_dir / f"{stem}.ndjson"
        with open(nd, "w") as fh:
            fh.write(json.dumps({"config": self.config_echo}) + "\n")
            for rec in self.to_records():
                fh.write(json.dumps(rec) + "\n")
        txt = out_dir / f"{stem}.txt"
        txt.write_text(self.table() + "\n")
        return nd, txt


def _resolve_policy(spec):
    """Accept a ready policy object or a checkpoint path."""
    if hasattr(spec, "predict"):
        return spec
    policy, _meta = policy_from_checkpoint(spec)
    return policy


def eval_success_rates(cfg: WorkbenchConfig, policies: dict, objects=None,
                       trials_per_cell: int | None = None,
                       base_seed: int | None = None,
                       include_baseline: bool = True,
                       progress=None) -> EvalReport:
    """Seeded autonomous trials for every (policy, object) pair.

    ``policies`` maps display names to policy objects or checkpoint paths.
    Every cell reuses the same per-trial seed list, so all models face the
    identical spawn sequence. A constant-output baseline is appended unless
    disabled.
    """
    if objects is None:
        objects = list(cfg.eval.trained_objects)
    if trials_per_cell is None:
        trials_per_cell = cfg.eval.trials_per_cell
    if base_seed is None:
        base_seed = cfg.eval.base_seed
    seeds = [base_seed + k for k in range(trials_per_cell)]

    resolved = {name: _resolve_policy(spec) for name, spec in policies.items()}
    if include_baseline and "constant" not in resolved:
        resolved["constant"] = ConstantPolicy()

    cells = []
    for name, policy in resolved.items():
        for obj in objects:
            cell = EvalCell(model=name, object=obj,
                            trained=obj in cfg.eval.trained_objects)
            for seed in seeds:
                result = run_autonomous_episode(cfg, policy, obj, seed=seed)
                cell.add_trial(seed, result.status, len(result.episode),
                               result.fault)
                if progress is not None:
                    progress(cell, seed, result)
            cells.append(cell)

    echo = {"trials_per_cell": trials_per_cell, "base_seed": base_seed,
            "objects": list(objects), "models": sorted(resolved),
            "trained_objects": list(cfg.eval.trained_objects),
            "timeout_s": cfg.eval.timeout_s}
    return EvalReport(cells=cells, config_echo=echo)


__all__ = ["EvalCell", "EvalReport", "eval_success_rates"]
