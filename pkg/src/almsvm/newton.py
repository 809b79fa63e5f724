"""Globalized semismooth Newton method with an inexact CG inner solver.

Solves ``grad(w) = 0`` for a strongly convex, piecewise-smooth objective
supplied through a :class:`SubproblemOracle`. Each iteration solves the
Newton system ``V d = -g`` approximately by conjugate gradients, with a
forcing term ``mu_j = min(eta0, eta1 * |g|)`` that tightens as the
gradient shrinks, then backtracks along ``d`` under the Armijo rule.
Because the Hessian selection satisfies ``V - I >= 0``, CG directions
are always well defined; a steepest-descent fallback covers the case
where rounding still produces a non-descent direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["SubproblemOracle", "NewtonStats", "CgBreakdownError",
           "LineSearchError", "cg_solve", "newton_solve"]


class CgBreakdownError(RuntimeError):
    """CG produced a non-finite iterate."""


class LineSearchError(RuntimeError):
    """Armijo backtracking failed; value and gradient disagree."""


@dataclass
class SubproblemOracle:
    """Callbacks defining one smooth subproblem of dimension ``n``.

    ``hvp(rows, h)`` applies the generalized-Hessian selection whose
    curvature lives on the given active rows; it must be symmetric
    positive definite for any row set.
    """

    n: int
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    active_set: Callable[[np.ndarray], np.ndarray]
    hvp: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class NewtonStats:
    """Per-solve counters and histories.

    ``grad_norms`` has one entry per gradient evaluation (iterations + 1
    values); ``step_sizes`` and ``active_set_sizes`` have one entry per
    executed iteration.
    """

    iterations: int = 0
    cg_iterations_total: int = 0
    final_grad_norm: float = float("nan")
    step_sizes: list[float] = field(default_factory=list)
    active_set_sizes: list[int] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    hit_iteration_cap: bool = False


def cg_solve(hvp, rhs, tol_abs: float, maxit: int):
    """Conjugate gradients for ``hvp(x) = rhs`` from ``x0 = 0``.

    Stops once ``|hvp(x) - rhs| <= tol_abs`` or after ``maxit``
    iterations, whichever comes first; returns ``(x, iterations)``. The
    recurrence residual is replaced by the explicit one every 50
    iterations to limit drift.
    """
    if tol_abs <= 0:
        raise ValueError("tol_abs must be positive")
    rhs = np.asarray(rhs, dtype=np.float64)
    x = np.zeros_like(rhs)
    r = rhs.copy()
    rr = float(r @ r)
    if np.sqrt(rr) <= tol_abs:
        return x, 0
    p = r.copy()
    for it in range(1, maxit + 1):
        ap = hvp(p)
        pap = float(p @ ap)
        if not np.isfinite(pap):
            raise CgBreakdownError("non-finite curvature in CG")
        if pap <= 0.0:
            # operator contract is SPD; bail out with the current iterate
            return x, it
        alpha = rr / pap
        x = x + alpha * p
        if it % 50 == 0:
            r = rhs - hvp(x)
        else:
            r = r - alpha * ap
        rr_new = float(r @ r)
        if not np.isfinite(rr_new):
            raise CgBreakdownError("non-finite residual in CG")
        if np.sqrt(rr_new) <= tol_abs:
            return x, it
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, maxit


def newton_solve(oracle: SubproblemOracle, w0, tol: float, cfg):
    """Run the globalized Newton iteration until ``|grad| <= tol``.

    ``cfg`` supplies ls_rho, ls_c1, cg_eta0, cg_eta1, cg_maxit and
    max_newton_per_outer. Returns ``(w, NewtonStats)``; if the iteration
    cap fires the stats are flagged instead of raising.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = np.array(w0, dtype=np.float64, copy=True)
    stats = NewtonStats()
    g = oracle.grad(w)
    gnorm = float(np.linalg.norm(g))
    stats.grad_norms.append(gnorm)
    while gnorm > tol:
        if stats.iterations >= cfg.max_newton_per_outer:
            stats.hit_iteration_cap = True
            break
        rows = oracle.active_set(w)
        stats.active_set_sizes.append(int(len(rows)))
        mu = min(cfg.cg_eta0, cfg.cg_eta1 * gnorm)
        d, cg_iters = cg_solve(
            lambda h: oracle.hvp(rows, h), -g, mu * gnorm, cfg.cg_maxit
        )
        stats.cg_iterations_total += cg_iters
        slope = float(g @ d)
        if slope >= 0.0:
            # rounding spoiled the CG direction; fall back to steepest descent
            d = -g
            slope = -gnorm * gnorm
        f0 = oracle.value(w)
        alpha = 1.0
        for _ in range(50):
            if oracle.value(w + alpha * d) <= f0 + cfg.ls_c1 * alpha * slope:
                break
            alpha *= cfg.ls_rho
        else:
            raise LineSearchError(
                "no Armijo step after 50 backtracks; "
                "gradient and value are inconsistent"
            )
        w = w + alpha * d
        stats.step_sizes.append(alpha)
        stats.iterations += 1
        g = oracle.grad(w)
        gnorm = float(np.linalg.norm(g))
        stats.grad_norms.append(gnorm)
    stats.final_grad_norm = gnorm
    return w, stats
