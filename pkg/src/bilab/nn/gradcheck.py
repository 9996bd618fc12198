"""Central-difference verification of the autodiff gradients.

Perturbs a random sample of individual parameters (at least two per
tensor) and compares the numeric slope against the tape gradient.  Loss
closures must be deterministic: run models with training=False so dropout
is off.

Sampling is magnitude-aware: a central difference of a loss of size |f|
at step eps cannot resolve slopes below roughly machine_eps * |f| / eps
(~1e-11 for |f| ~ 1, eps = 1e-5), so entries whose analytic gradient sits
under `informative_min` are excluded; comparing them tests only roundoff.
Large tensors always contain such chance near-zeros.  If an entire tensor
has no informative entry, its largest-magnitude entries are checked
anyway, so a bug that silently zeroes a tensor's gradient still fails
loudly against the numeric slope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layers import zero_grads


@dataclass
class GradCheckEntry:
    tensor: str
    index: int
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    max_rel_error: float
    n_checked: int
    tol: float
    worst: list = field(default_factory=list)
    checked_per_tensor: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tol

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"grad_check: {verdict} max_rel_error={self.max_rel_error:.3e} "
                f"(tol {self.tol:.0e}, {self.n_checked} samples)")


def relative_error(a: float, n: float) -> float:
    return abs(a - n) / max(abs(a), abs(n), 1e-8)


def _sample_indices(params: dict, analytic: dict, n_samples: int,
                    rng: np.random.Generator, informative_min: float):
    """At least two entries per tensor, remainder allocated by tensor size,
    drawn from entries the finite-difference oracle can actually resolve."""
    pools = {}
    for name in params:
        g = np.abs(analytic[name].reshape(-1))
        pool = np.flatnonzero(g >= informative_min)
        if pool.size < 2:
            # nothing informative: probe the largest entries so an
            # all-zero (buggy) gradient still gets compared
            pool = np.argsort(g)[-min(2, g.size):]
        pools[name] = pool

    chosen = []
    names = list(params)
    for name in names:
        pool = pools[name]
        take = min(2, pool.size)
        for idx in rng.choice(pool, size=take, replace=False):
            chosen.append((name, int(idx)))
    extra = n_samples - len(chosen)
    if extra > 0:
        sizes = np.array([pools[n].size for n in names], dtype=float)
        probs = sizes / sizes.sum()
        picks = rng.choice(len(names), size=extra, p=probs)
        for i in picks:
            name = names[i]
            chosen.append((name, int(rng.choice(pools[name]))))
    return chosen


def grad_check(loss_fn, params: dict, n_samples: int = 200, eps: float = 1e-5,
               tol: float = 1e-4, seed: int = 0, keep_worst: int = 10,
               informative_min: float = 1e-6) -> GradCheckReport:
    """loss_fn() -> scalar loss Tensor, recomputable at perturbed params."""
    rng = np.random.default_rng(seed)
    zero_grads(params)
    loss = loss_fn()
    loss.backward()
    analytic = {}
    for name, p in params.items():
        g = np.zeros_like(p.data) if p.grad is None else p.grad.copy()
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in tensor {name!r}")
        analytic[name] = g

    entries = []
    for name, flat_idx in _sample_indices(params, analytic, n_samples, rng,
                                          informative_min):
        p = params[name]
        flat = p.data.reshape(-1)
        saved = flat[flat_idx]
        flat[flat_idx] = saved + eps
        up = float(loss_fn().data)
        flat[flat_idx] = saved - eps
        down = float(loss_fn().data)
        flat[flat_idx] = saved
        numeric = (up - down) / (2.0 * eps)
        a = float(analytic[name].reshape(-1)[flat_idx])
        entries.append(GradCheckEntry(name, flat_idx, a, numeric,
                                      relative_error(a, numeric)))

    entries.sort(key=lambda e: e.rel_error, reverse=True)
    worst = entries[:keep_worst]
    max_err = worst[0].rel_error if worst else 0.0
    counts = {}
    for e in entries:
        counts[e.tensor] = counts.get(e.tensor, 0) + 1
    return GradCheckReport(max_rel_error=max_err, n_checked=len(entries),
                           tol=tol, worst=worst, checked_per_tensor=counts)
