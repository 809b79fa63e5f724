"""Proximal maps, Moreau envelopes and active index sets.

Two penalties are covered, both scaled by a weight C > 0:

* hinge penalty          C * sum(max(s_i, 0))
* eps-insensitive penalty C * sum(max(|s_i| - eps, 0))

``prox_*`` evaluates the proximal map at scale M > 0, i.e. the minimizer
of ``|s - z|^2 / (2 M) + penalty(s)``; ``moreau_env_*`` evaluates the
corresponding envelope value ``0.5 |s* - z|^2 + M * penalty(s*)``. Both
maps are piecewise linear and are computed with branch-free min/max
forms. The active sets collect the coordinates where the prox has local
slope one, which is where curvature survives in the solver's Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProxParams",
    "p_value",
    "p_eps_value",
    "prox_hinge",
    "prox_eps",
    "moreau_env_hinge",
    "moreau_env_eps",
    "active_set_svc",
    "active_set_svr",
]


@dataclass(frozen=True)
class ProxParams:
    """Penalty weight C, prox scale M and tube half-width eps."""

    C: float
    M: float
    eps: float = 0.0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")


def p_value(s, C: float) -> float:
    """Hinge penalty C * sum(max(s_i, 0))."""
    s = np.asarray(s, dtype=np.float64)
    return C * float(np.maximum(s, 0.0).sum())


def p_eps_value(s, C: float, eps: float) -> float:
    """Eps-insensitive penalty C * sum(max(|s_i| - eps, 0))."""
    s = np.asarray(s, dtype=np.float64)
    return C * float(np.maximum(np.abs(s) - eps, 0.0).sum())


def prox_hinge(z, C: float, M: float):
    """Elementwise max(z - C*M, 0) + min(z, 0)."""
    z = np.asarray(z, dtype=np.float64)
    cm = C * M
    return np.maximum(z - cm, 0.0) + np.minimum(z, 0.0)


def prox_eps(z, C: float, M: float, eps: float):
    """Elementwise max(min(z, max(z - C*M, eps)), min(z + C*M, -eps))."""
    z = np.asarray(z, dtype=np.float64)
    cm = C * M
    return np.maximum(
        np.minimum(z, np.maximum(z - cm, eps)), np.minimum(z + cm, -eps)
    )


def moreau_env_hinge(z, C: float, M: float) -> float:
    z = np.asarray(z, dtype=np.float64)
    s = prox_hinge(z, C, M)
    diff = s - z
    return 0.5 * float(diff @ diff) + M * p_value(s, C)


def moreau_env_eps(z, C: float, M: float, eps: float) -> float:
    z = np.asarray(z, dtype=np.float64)
    s = prox_eps(z, C, M, eps)
    diff = s - z
    return 0.5 * float(diff @ diff) + M * p_eps_value(s, C, eps)


def active_set_svc(z, C: float, sigma: float) -> np.ndarray:
    """Sorted indices with z_i strictly inside (0, C/sigma).

    Boundary points are excluded: there the Jacobian selection takes
    slope one, dropping the coordinate from the Newton system.
    """
    z = np.asarray(z, dtype=np.float64)
    cs = C / sigma
    return np.flatnonzero((z > 0.0) & (z < cs))


def active_set_svr(z, C: float, sigma: float, eps: float) -> np.ndarray:
    """Sorted indices with z_i in (eps, eps + C/sigma) or its mirror
    (-eps - C/sigma, -eps); all four breakpoints excluded."""
    z = np.asarray(z, dtype=np.float64)
    cs = C / sigma
    pos = (z > eps) & (z < eps + cs)
    neg = (z > -eps - cs) & (z < -eps)
    return np.flatnonzero(pos | neg)
