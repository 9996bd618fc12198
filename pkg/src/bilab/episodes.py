"""Episode container plus CSV persistence.

One row per control step.  Column layout is fixed:

    step,t,l_th1,l_om1,l_tau1,...,l_tau5,f_th1,f_om1,f_tau5

i.e. after the step index and time come five (angle, velocity, torque)
triples for the leader then five for the follower, 32 columns total.  The
torque column stores the reaction-force-observer output, not the motor
command.  Floats are written with repr() so a read-back is bit exact.

Next to every `<name>.csv` a `<name>.meta.json` records object, seed,
outcome flags and anything else the writer wants to stash.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import N_JOINTS


def episode_header() -> list[str]:
    cols = ["step", "t"]
    for robot in ("l", "f"):
        for j in range(1, N_JOINTS + 1):
            cols += [f"{robot}_th{j}", f"{robot}_om{j}", f"{robot}_tau{j}"]
    return cols


EPISODE_HEADER = episode_header()


@dataclass
class Episode:
    """Recorded bilateral run.  Arrays are (steps, 5) float64."""

    t: np.ndarray
    leader_theta: np.ndarray
    leader_omega: np.ndarray
    leader_tau: np.ndarray
    follower_theta: np.ndarray
    follower_omega: np.ndarray
    follower_tau: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in ("leader_theta", "leader_omega", "leader_tau",
                     "follower_theta", "follower_omega", "follower_tau"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n, N_JOINTS):
                raise ValueError(f"{name} has shape {arr.shape}, want ({n}, {N_JOINTS})")
            setattr(self, name, arr)
        self.t = np.asarray(self.t, dtype=float)

    def __len__(self) -> int:
        return len(self.t)

    def leader_rows(self) -> np.ndarray:
        """(steps, 15) interleaved th/om/tau per joint, leader side."""
        return _interleave(self.leader_theta, self.leader_omega, self.leader_tau)

    def follower_rows(self) -> np.ndarray:
        return _interleave(self.follower_theta, self.follower_omega, self.follower_tau)


def _interleave(theta: np.ndarray, omega: np.ndarray, tau: np.ndarray) -> np.ndarray:
    out = np.empty((theta.shape[0], 3 * N_JOINTS))
    out[:, 0::3] = theta
    out[:, 1::3] = omega
    out[:, 2::3] = tau
    return out


def _deinterleave(block: np.ndarray):
    return block[:, 0::3].copy(), block[:, 1::3].copy(), block[:, 2::3].copy()


def meta_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def save_episode(ep: Episode, path) -> Path:
    if len(ep) == 0:
        raise ValueError("refusing to write an episode with no steps")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lrows = ep.leader_rows()
    frows = ep.follower_rows()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EPISODE_HEADER)
        for i in range(len(ep)):
            row = [str(i), repr(float(ep.t[i]))]
            row += [repr(float(v)) for v in lrows[i]]
            row += [repr(float(v)) for v in frows[i]]
            w.writerow(row)
    with open(meta_path(path), "w") as fh:
        json.dump(ep.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_episode(path) -> Episode:
    path = Path(path)
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != EPISODE_HEADER:
            raise ValueError(f"{path}: unexpected episode header {header[:4]}...")
        rows = [row for row in r]
    n = len(rows)
    t = np.empty(n)
    block = np.empty((n, 2 * 3 * N_JOINTS))
    for i, row in enumerate(rows):
        line = i + 2  # header occupies line 1
        if len(row) != len(EPISODE_HEADER):
            raise ValueError(f"{path}: line {line}: {len(row)} fields, "
                             f"want {len(EPISODE_HEADER)}")
        try:
            t[i] = float(row[1])
            block[i] = [float(v) for v in row[2:]]
        except ValueError as err:
            raise ValueError(f"{path}: line {line}: {err}") from None
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if bad.size:
        raise ValueError(f"{path}: line {int(bad[0]) + 3}: time does not "
                         "strictly increase")
    lth, lom, ltau = _deinterleave(block[:, :3 * N_JOINTS])
    fth, fom, ftau = _deinterleave(block[:, 3 * N_JOINTS:])
    meta = {}
    mp = meta_path(path)
    if mp.exists():
        with open(mp) as fh:
            meta = json.load(fh)
    return Episode(t=t, leader_theta=lth, leader_omega=lom, leader_tau=ltau,
                   follower_theta=fth, follower_omega=fom, follower_tau=ftau,
                   meta=meta)


def list_episodes(directory) -> list[Path]:
    return sorted(Path(directory).glob("*.csv"))
