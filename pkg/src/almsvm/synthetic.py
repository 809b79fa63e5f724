"""Deterministic synthetic datasets for tests, benchmarks and examples.

Every generator is a pure function of its arguments (numpy's PCG64
stream under a fixed seed), so the "bundled" instances used across the
test suite are reproducible without shipping data files.

Two families exist. The blob/linear generators produce ordinary noisy
data. The planted generators construct datasets whose training optimum
is known by design: they pick the set of bound-active multipliers
first, derive the weight vector from it, and then place every remaining
sample strictly on its side of the penalty breakpoints. Such instances
have a strict-complementarity vertex solution, which the multiplier
iteration identifies exactly after finitely many outer steps; they are
the instances on which tight optimality certification is exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data_io import Dataset

__all__ = [
    "svc_blobs",
    "svc_sparse_binary",
    "svc_margin_gap",
    "svr_linear",
    "svr_planted",
    "BundledInstance",
    "bundled_instances",
]


def _dense_rows(x: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    n = x.shape[1]
    all_idx = np.arange(n, dtype=np.int64)
    return [(all_idx, np.asarray(row, dtype=np.float64)) for row in x]


def svc_blobs(
    m: int,
    n: int,
    *,
    separation: float = 2.0,
    scale: float = 1.0,
    flip: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Two Gaussian clouds pushed apart along a random unit direction.

    ``separation`` is the class offset along that direction before
    isotropic noise of standard deviation ``scale`` is added; ``flip``
    flips that fraction of labels to make the classes overlap.
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=n)
    direction /= np.linalg.norm(direction)
    y = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    x = scale * rng.normal(size=(m, n)) + np.outer(y * separation, direction)
    if flip > 0.0:
        y = np.where(rng.random(m) < flip, -y, y)
    return Dataset(_dense_rows(x), y, n)


def svc_sparse_binary(
    m: int,
    n: int,
    *,
    density: float = 0.11,
    margin_noise: float = 0.5,
    flip: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Sparse 0/1 feature rows labeled by a noisy linear rule.

    Every row activates ``round(density * n)`` distinct features with
    value one; scores against a hidden weight vector are centered at
    their median and perturbed before taking the sign.
    """
    rng = np.random.default_rng(seed)
    k = max(1, int(round(density * n)))
    hidden = rng.normal(size=n)
    samples = []
    raw = np.empty(m)
    for i in range(m):
        cols = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
        samples.append((cols, np.ones(k)))
        raw[i] = hidden[cols].sum()
    score = raw - np.median(raw) + margin_noise * rng.normal(size=m)
    y = np.where(score >= 0.0, 1.0, -1.0)
    if flip > 0.0:
        y = np.where(rng.random(m) < flip, -y, y)
    return Dataset(samples, y, n)


def svc_margin_gap(
    m: int,
    n: int,
    *,
    density: float = 0.11,
    viol_frac: float = 0.03,
    value_scale: float = 0.3,
    window_hi: float = 0.2,
    safe_lo: float = 1.05,
    safe_span: float = 2.0,
    c_scale: float = 550.0,
    seed: int = 0,
) -> Dataset:
    """Sparse classification data with a planted margin gap.

    A violator set V of ``viol_frac * m`` rows is chosen and the
    training optimum is planted as ``w* = C * sum_V y_i x_i`` with
    ``C = c_scale / m``. Violator labels are flipped (or their rows
    shrunk) until every violator margin sits at or below ``window_hi``;
    every other row is labeled by the sign of its score and rescaled so
    its margin lands in ``[safe_lo, safe_lo + safe_span]``. No sample
    then has a margin in ``(window_hi, safe_lo)``, the optimum is a
    strict-complementarity vertex, and the fraction of rows inside the
    solver's curvature window stays small throughout a solve.
    """
    rng = np.random.default_rng(seed)
    k = max(1, int(round(density * n)))
    C = c_scale / m
    supports = [
        np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
        for _ in range(m)
    ]
    vals = [value_scale * rng.normal(size=k) for _ in range(m)]
    n_viol = max(1, int(round(viol_frac * m)))
    viol = rng.choice(m, size=n_viol, replace=False)
    y = rng.choice([-1.0, 1.0], size=m)

    # Gauss-Seidel repair on the violators: each visit either flips the
    # label or shrinks the row until margin_i <= window_hi everywhere.
    clean = False
    for _ in range(60):
        w = np.zeros(n)
        for i in viol:
            w[supports[i]] += C * y[i] * vals[i]
        clean = True
        for i in viol:
            margin = y[i] * float(vals[i] @ w[supports[i]])
            if margin <= window_hi:
                continue
            clean = False
            self_term = C * float(vals[i] @ vals[i])
            cross = margin - self_term
            if self_term - cross <= window_hi:
                w[supports[i]] -= 2.0 * C * y[i] * vals[i]
                y[i] = -y[i]
            else:
                # margin(c) = self*c^2 + cross*c; pick the positive root
                # hitting half the allowed ceiling
                target = 0.5 * window_hi
                c = (-cross + math.sqrt(cross * cross + 4.0 * self_term * target))
                c /= 2.0 * self_term
                w[supports[i]] -= C * y[i] * vals[i]
                vals[i] = vals[i] * c
                w[supports[i]] += C * y[i] * vals[i]
        if clean:
            break
    if not clean:
        raise RuntimeError("margin-gap construction did not settle")

    w = np.zeros(n)
    for i in viol:
        w[supports[i]] += C * y[i] * vals[i]
    viol_set = set(int(i) for i in viol)
    for i in range(m):
        if i in viol_set:
            continue
        t = float(vals[i] @ w[supports[i]])
        while abs(t) < 0.05:
            vals[i] = value_scale * rng.normal(size=k)
            t = float(vals[i] @ w[supports[i]])
        y[i] = 1.0 if t > 0 else -1.0
        target = safe_lo + safe_span * rng.random()
        vals[i] = vals[i] * (target / abs(t))
    samples = [(s, v.astype(np.float64)) for s, v in zip(supports, vals)]
    return Dataset(samples, np.asarray(y, dtype=np.float64), n)


def svr_linear(
    m: int,
    n: int,
    *,
    scale: float = 1.0,
    noise: float = 0.1,
    seed: int = 0,
) -> Dataset:
    """Dense regression rows y = x . hidden + Gaussian noise."""
    rng = np.random.default_rng(seed)
    x = scale * rng.normal(size=(m, n))
    hidden = rng.normal(size=n) / np.sqrt(n)
    y = x @ hidden + noise * rng.normal(size=m)
    return Dataset(_dense_rows(x), y, n)


def svr_planted(
    m: int,
    n: int,
    *,
    out_frac: float = 0.05,
    eps: float = 0.1,
    c_scale: float = 5.0,
    seed: int = 0,
) -> Dataset:
    """Dense regression data with a planted vertex optimum.

    With ``C = c_scale / n``, an outlier set O with random residual
    signs defines the optimum ``w* = -C * sum_O s_i x_i``. Targets are
    then chosen so outliers land strictly outside the eps tube on their
    sign's side and every other sample strictly inside it.
    """
    rng = np.random.default_rng(seed)
    C = c_scale / n
    x = rng.normal(size=(m, n))
    n_out = max(1, int(round(out_frac * m)))
    out = rng.choice(m, size=n_out, replace=False)
    signs = rng.choice([-1.0, 1.0], size=n_out)
    w_star = -C * (signs[:, None] * x[out]).sum(axis=0)
    y = x @ w_star - rng.uniform(-0.8 * eps, 0.8 * eps, size=m)
    y[out] = x[out] @ w_star - signs * (eps + 0.5 + rng.random(n_out))
    return Dataset(_dense_rows(x), y, n)


@dataclass(frozen=True)
class BundledInstance:
    """A named dataset recipe with its default training parameters."""

    name: str
    task: str
    make: Callable[[], Dataset]
    c_of: Callable[[Dataset], float]
    eps: float = 0.0

    def dataset(self) -> Dataset:
        return self.make()

    def c(self, d: Dataset) -> float:
        return self.c_of(d)


def bundled_instances() -> list[BundledInstance]:
    """The fixed instance suite used by the certification tests.

    Sizes span m in [50, 5000] and n in [2, 500] over both tasks; C
    follows the defaults (550/m for classification, 5/n for regression,
    eps = 0.1).
    """
    return [
        BundledInstance(
            name="blobs50x2",
            task="svc",
            make=lambda: svc_blobs(50, 2, separation=8.0, scale=1.5, seed=11),
            c_of=lambda d: 550.0 / d.m,
        ),
        BundledInstance(
            name="blobs200x10",
            task="svc",
            make=lambda: svc_blobs(200, 10, separation=8.0, scale=1.5, seed=7),
            c_of=lambda d: 550.0 / d.m,
        ),
        BundledInstance(
            name="gap5000x123",
            task="svc",
            make=lambda: svc_margin_gap(5000, 123, density=0.11, seed=23),
            c_of=lambda d: 550.0 / d.m,
        ),
        BundledInstance(
            name="svr500x50",
            task="svr",
            make=lambda: svr_planted(500, 50, out_frac=0.05, seed=31),
            c_of=lambda d: 5.0 / d.n_features,
            eps=0.1,
        ),
        BundledInstance(
            name="svr300x500",
            task="svr",
            make=lambda: svr_planted(300, 500, out_frac=0.08, seed=41),
            c_of=lambda d: 5.0 / d.n_features,
            eps=0.1,
        ),
    ]
