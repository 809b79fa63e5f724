"""Independent verification oracles.

Nothing here is used on the production solve path. These routines
re-derive the quantities the solver computes in closed form — proximal
points by piecewise-quadratic enumeration, gradients by central
differences, the Hessian-vector product by the unrestricted formula —
so the test suite can check the fast paths against slow, obviously
correct ones. The CLI only touches this module through a hidden
``--self-check`` flag.
"""

from __future__ import annotations

import math

import numpy as np

from .alm import Problem, primal_objective

__all__ = ["prox_oracle", "fd_gradient", "subgradient_solve", "hess_vec_way2"]


def prox_oracle(z, C: float, M: float, eps: float | None = None):
    """Proximal point by brute-force piece enumeration.

    The objective ``(z - s)^2 / (2 M) + penalty(s)`` is quadratic on each
    interval between penalty breakpoints ({0} for the hinge penalty,
    {-eps, eps} for the eps-insensitive one). Each piece's quadratic is
    minimized in closed form, the minimizer is clamped to the piece, and
    the best candidate wins. No branch structure of the closed-form prox
    is consulted. Accepts scalars or arrays.
    """
    z = np.asarray(z, dtype=np.float64)
    cm = C * M
    if eps is None:
        # pieces: s <= 0 (no penalty slope), s >= 0 (slope C)
        cands = np.stack([np.minimum(z, 0.0), np.maximum(z - cm, 0.0)])
        objs = (z - cands) ** 2 / (2.0 * M) + C * np.maximum(cands, 0.0)
    else:
        if eps < 0:
            raise ValueError("eps must be nonnegative")
        # pieces: s <= -eps (slope -C), |s| <= eps (flat), s >= eps (slope C)
        cands = np.stack(
            [
                np.minimum(z + cm, -eps),
                np.clip(z, -eps, eps),
                np.maximum(z - cm, eps),
            ]
        )
        objs = (z - cands) ** 2 / (2.0 * M) + C * np.maximum(
            np.abs(cands) - eps, 0.0
        )
    flat_c = cands.reshape(cands.shape[0], -1)
    flat_o = objs.reshape(objs.shape[0], -1)
    pick = np.argmin(flat_o, axis=0)
    best = flat_c[pick, np.arange(flat_c.shape[1])].reshape(z.shape)
    return float(best) if z.ndim == 0 else best


def fd_gradient(f, w, h: float | None = None) -> np.ndarray:
    """Central-difference gradient of a scalar function.

    Step defaults to 1e-6 * (1 + |w_i|) per coordinate.
    """
    w = np.asarray(w, dtype=np.float64)
    g = np.zeros(w.size)
    for i in range(w.size):
        hi = h if h is not None else 1e-6 * (1.0 + abs(w[i]))
        wp = w.copy()
        wm = w.copy()
        wp[i] += hi
        wm[i] -= hi
        g[i] = (f(wp) - f(wm)) / (2.0 * hi)
    return g


def subgradient_solve(problem: Problem, iters: int, step0: float):
    """Plain subgradient descent on the primal objective.

    Steps w <- w - (step0 / sqrt(t)) * g_t with g_t a subgradient of the
    objective; at penalty kinks the zero element is chosen. Returns the
    best iterate seen and its objective. Slow by design — this is a
    floor for the real solver to beat, not a solver.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    B, d, C = problem.B, problem.d, problem.C
    w = np.zeros(problem.n)
    best_w = w.copy()
    best_obj = primal_objective(problem, w)
    for t in range(1, iters + 1):
        s = B.matvec(w) + d
        if problem.task == "svc":
            a = np.where(s > 0.0, C, 0.0)
        else:
            a = np.where(np.abs(s) > problem.eps, C * np.sign(s), 0.0)
        g = w + B.matvec_t(a)
        w = w - (step0 / math.sqrt(t)) * g
        obj = primal_objective(problem, w)
        if obj < best_obj:
            best_obj = obj
            best_w = w.copy()
    return best_w, best_obj


def hess_vec_way2(problem: Problem, u, h, sigma: float) -> np.ndarray:
    """Hessian-vector product through the unrestricted diagonal formula
    ``h + sigma * B.T (B h) - sigma * B.T diag(u) (B h)``.

    Mirror used in tests against the row-restricted production kernel.
    """
    u = np.asarray(u, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    B = problem.B
    t = B.matvec(h)
    return h + sigma * B.matvec_t(t) - sigma * B.matvec_t(u * t)


def self_check() -> None:
    """Startup sanity check: prox grid agreement and a gradient probe.

    Raises AssertionError on the first disagreement.
    """
    from . import alm
    from .prox import prox_eps, prox_hinge
    from .sparse import SparseMatrix

    rng = np.random.default_rng(0)
    for _ in range(3):
        C = float(rng.uniform(0.1, 5.0))
        M = float(rng.uniform(0.1, 5.0))
        eps = float(rng.uniform(0.0, 1.0))
        span = 3.0 * (C * M + eps + 1.0)
        z = np.linspace(-span, span, 1001)
        assert np.allclose(prox_hinge(z, C, M), prox_oracle(z, C, M), atol=1e-12)
        assert np.allclose(
            prox_eps(z, C, M, eps), prox_oracle(z, C, M, eps), atol=1e-12
        )

    B = SparseMatrix.from_dense(rng.normal(size=(6, 4)))
    prob = Problem(B=B, d=np.ones(6), C=1.3, task="svc")
    lam = rng.uniform(0.0, 1.0, size=6)
    w = rng.normal(size=4)
    g = alm.phi_grad(prob, w, lam, 0.9)
    g_fd = fd_gradient(lambda v: alm.phi_value(prob, v, lam, 0.9), w)
    assert np.allclose(g, g_fd, rtol=1e-5, atol=1e-7)
