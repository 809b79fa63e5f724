"""Problem assembly, the augmented-Lagrangian outer loop and optimality
certification.

Both supported models share one template::

    minimize  0.5 * ||w||^2 + penalty(B w + d)

* classification (task "svc"):  B = -diag(y) X, d = ones, hinge penalty;
* regression (task "svr"):      B = X, d = -y, eps-insensitive penalty.

Each outer iteration minimizes the smoothed subproblem

    phi(w) = 0.5*||w||^2 - ||lam||^2/(2*sigma) + sigma * env(B w + d + lam/sigma)

over w with the semismooth Newton-CG solver (``env`` is the Moreau
envelope of the penalty scaled by 1/sigma), recovers the auxiliary point
s through the proximal map, updates the multiplier lam and grows the
penalty parameter sigma geometrically up to a cap. Optimality is
certified by three scaled KKT residuals and the duality gap against the
box-projected multiplier.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data_io import Dataset
from .newton import SubproblemOracle, newton_solve
from .prox import (
    active_set_svc,
    active_set_svr,
    moreau_env_eps,
    moreau_env_hinge,
    p_eps_value,
    p_value,
    prox_eps,
    prox_hinge,
)
from .sparse import SparseMatrix

__all__ = [
    "SVC",
    "SVR",
    "DivergedError",
    "Problem",
    "SolverConfig",
    "SolveReport",
    "build_svc",
    "build_svr",
    "primal_objective",
    "dual_objective",
    "phi_value",
    "phi_grad",
    "hess_vec",
    "make_subproblem_oracle",
    "kkt_residual",
    "alm_solve",
]

SVC = "svc"
SVR = "svr"


class DivergedError(RuntimeError):
    """Solver state left the finite range."""


@dataclass(frozen=True)
class Problem:
    """One assembled training instance.

    ``d`` is the constant offset in the constraint ``s = B w + d``:
    all-ones for classification, ``-y`` for regression.
    """

    B: SparseMatrix
    d: np.ndarray
    C: float
    task: str
    eps: float = 0.0

    def __post_init__(self):
        if self.task not in (SVC, SVR):
            raise ValueError(f"task must be {SVC!r} or {SVR!r}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.d.shape != (self.B.m,):
            raise ValueError("d must have one entry per row of B")
        if not np.all(np.isfinite(self.d)):
            raise ValueError("d must be finite")
        if self.task == SVR and self.eps < 0:
            raise ValueError("eps must be nonnegative")

    @property
    def m(self) -> int:
        return self.B.m

    @property
    def n(self) -> int:
        return self.B.n


@dataclass
class SolverConfig:
    """Tunables of the outer loop and the Newton-CG subsolver.

    Defaults follow the reference parameterization: sigma starts at 0.15
    and grows by 1/theta = 1.25 per outer iteration up to 2; at most 10
    outer iterations; inner tolerance ``max(newton_tol_floor,
    10**-(k+1))`` at outer iteration k. ``seed`` is carried for
    provenance (dataset splits); the solve itself draws no randomness.
    """

    sigma0: float = 0.15
    sigma_max: float = 2.0
    theta: float = 0.8
    tol: float = 1e-6
    max_outer: int = 10
    newton_tol_floor: float = 1e-6
    ls_rho: float = 0.5
    ls_c1: float = 1e-4
    cg_eta0: float = 0.9
    cg_eta1: float = 0.1
    cg_maxit: int = 200
    max_newton_per_outer: int = 50
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.ls_rho < 1.0:
            raise ValueError("ls_rho must be in (0, 1)")
        if not 0.0 < self.ls_c1 < 1.0:
            raise ValueError("ls_c1 must be in (0, 1)")
        if not 0.0 < self.sigma0 <= self.sigma_max:
            raise ValueError("need 0 < sigma0 <= sigma_max")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must be in (0, 1]")
        if self.tol <= 0 or self.newton_tol_floor <= 0:
            raise ValueError("tolerances must be positive")
        if self.cg_eta0 <= 0 or self.cg_eta1 <= 0:
            raise ValueError("cg_eta0 and cg_eta1 must be positive")
        for name in ("max_outer", "cg_maxit", "max_newton_per_outer"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class SolveReport:
    """Statistics of one ``alm_solve`` run.

    ``active_set_history`` holds |I(z)| per Newton iteration across the
    whole run; ``newton_iters_per_outer`` gives the per-outer-loop
    boundaries for slicing it. ``grad_norm_history[k]`` lists the Newton
    gradient norms of outer iteration k (iterations + 1 entries).
    """

    k: int = 0
    it_sn: int = 0
    it_cg: int = 0
    time_seconds: float = 0.0
    kkt_residual: float = math.inf
    duality_gap: float = math.inf
    duality_gap_rel: float = math.inf
    objective: float = math.inf
    active_set_history: list[int] = field(default_factory=list)
    grad_norm_history: list[list[float]] = field(default_factory=list)
    newton_iters_per_outer: list[int] = field(default_factory=list)
    inner_grad_norms: list[float] = field(default_factory=list)
    inner_tols: list[float] = field(default_factory=list)
    sigma_history: list[float] = field(default_factory=list)
    primal_history: list[float] = field(default_factory=list)
    dual_history: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _matrix_from(train: Dataset) -> SparseMatrix:
    return SparseMatrix.from_rows(train.samples, train.n_features)


def build_svc(train: Dataset, C: float) -> Problem:
    """Assemble the classification instance: B = -diag(y) X, d = ones."""
    y = np.asarray(train.labels, dtype=np.float64)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be in {-1, +1}; normalize first")
    X = _matrix_from(train)
    return Problem(B=X.scale_rows(-y), d=np.ones(train.m), C=float(C), task=SVC)


def build_svr(train: Dataset, C: float, eps: float) -> Problem:
    """Assemble the regression instance: B = X, d = -y."""
    y = np.asarray(train.labels, dtype=np.float64)
    X = _matrix_from(train)
    return Problem(B=X, d=-y, C=float(C), task=SVR, eps=float(eps))


def _penalty(p: Problem, s) -> float:
    if p.task == SVC:
        return p_value(s, p.C)
    return p_eps_value(s, p.C, p.eps)


def _prox(p: Problem, z, M: float):
    if p.task == SVC:
        return prox_hinge(z, p.C, M)
    return prox_eps(z, p.C, M, p.eps)


def _envelope(p: Problem, z, M: float) -> float:
    if p.task == SVC:
        return moreau_env_hinge(z, p.C, M)
    return moreau_env_eps(z, p.C, M, p.eps)


def _active(p: Problem, z, sigma: float) -> np.ndarray:
    if p.task == SVC:
        return active_set_svc(z, p.C, sigma)
    return active_set_svr(z, p.C, sigma, p.eps)


def primal_objective(p: Problem, w) -> float:
    """0.5*||w||^2 + penalty(B w + d)."""
    w = np.asarray(w, dtype=np.float64)
    s = p.B.matvec(w) + p.d
    return 0.5 * float(w @ w) + _penalty(p, s)


def dual_objective(p: Problem, lam):
    """Dual value at the box projection of ``lam``.

    The multiplier is projected onto its feasible box ([0, C] per
    coordinate for classification, [-C, C] for regression) so the
    returned value is always a valid lower bound; the projection
    distance comes back as a feasibility diagnostic. Regression pays the
    extra ``eps * ||lam||_1`` term.
    """
    lam = np.asarray(lam, dtype=np.float64)
    if lam.shape != (p.m,):
        raise ValueError(f"lam must have length {p.m}")
    if p.task == SVC:
        lam_hat = np.clip(lam, 0.0, p.C)
    else:
        lam_hat = np.clip(lam, -p.C, p.C)
    dist = float(np.linalg.norm(lam - lam_hat))
    bt = p.B.matvec_t(lam_hat)
    value = -0.5 * float(bt @ bt) + float(lam_hat @ p.d)
    if p.task == SVR:
        value -= p.eps * float(np.abs(lam_hat).sum())
    return value, dist


def _z_of(p: Problem, w, lam, sigma: float) -> np.ndarray:
    return p.B.matvec(w) + p.d + lam / sigma


def phi_value(p: Problem, w, lam, sigma: float) -> float:
    """Subproblem objective phi(w) at multiplier ``lam`` and penalty
    ``sigma``."""
    w = np.asarray(w, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    z = _z_of(p, w, lam, sigma)
    tau = _envelope(p, z, 1.0 / sigma)
    return 0.5 * float(w @ w) - float(lam @ lam) / (2.0 * sigma) + sigma * tau


def phi_grad(p: Problem, w, lam, sigma: float) -> np.ndarray:
    """Gradient of phi: w + sigma * B.T (z - prox(z)) with z = Bw + d +
    lam/sigma. The prox residual form avoids cancellation between the
    multiplier and penalty terms."""
    w = np.asarray(w, dtype=np.float64)
    z = _z_of(p, w, lam, sigma)
    s = _prox(p, z, 1.0 / sigma)
    return w + sigma * p.B.matvec_t(z - s)


def hess_vec(p: Problem, rows, h, sigma: float) -> np.ndarray:
    """Apply the Hessian selection V = I + sigma * B[rows,:].T B[rows,:],
    touching only the active rows."""
    h = np.asarray(h, dtype=np.float64)
    return h + sigma * p.B.restricted_normal_apply(rows, h)


def make_subproblem_oracle(p: Problem, lam, sigma: float) -> SubproblemOracle:
    lam = np.asarray(lam, dtype=np.float64)

    def value(w):
        return phi_value(p, w, lam, sigma)

    def grad(w):
        return phi_grad(p, w, lam, sigma)

    def active(w):
        return _active(p, _z_of(p, w, lam, sigma), sigma)

    def hvp(rows, h):
        return hess_vec(p, rows, h, sigma)

    return SubproblemOracle(n=p.n, value=value, grad=grad, active_set=active,
                            hvp=hvp)


def kkt_residual(p: Problem, w, s, lam):
    """Scaled residuals (r1, r2, r3) of the optimality system.

    r1 measures the split constraint s = Bw + d, r2 stationarity
    w + B.T lam = 0, and r3 the penalty subdifferential inclusion via
    its fixed-point form s = prox(s + lam) at unit scale.
    """
    w = np.asarray(w, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    bw = p.B.matvec(w)
    r1 = float(np.linalg.norm(s - bw - p.d)) / (1.0 + float(np.linalg.norm(p.d)))
    r2 = float(np.linalg.norm(w + p.B.matvec_t(lam))) / (
        1.0 + float(np.linalg.norm(w))
    )
    r3 = float(np.linalg.norm(s - _prox(p, s + lam, 1.0))) / (
        1.0 + float(np.linalg.norm(s))
    )
    return r1, r2, r3


def _check_finite(*arrays) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DivergedError("non-finite solver state encountered")


def alm_solve(p: Problem, cfg: SolverConfig | None = None):
    """Run the outer loop and return ``(w, SolveReport)``.

    Starts from w = ones, lam = 0. Each outer iteration k solves the
    subproblem to gradient tolerance ``max(newton_tol_floor,
    10**-(k+1))``, recovers s through the prox at scale 1/sigma, updates
    lam = sigma * (z - s) (the multiplier step written in terms of z)
    and grows sigma by 1/theta up to sigma_max. Stops early once
    max(r1, r2, r3) drops to ``cfg.tol``.
    """
    cfg = cfg if cfg is not None else SolverConfig()
    report = SolveReport()
    w = np.ones(p.n)
    lam = np.zeros(p.m)
    sigma = cfg.sigma0
    t0 = time.perf_counter()
    for k in range(cfg.max_outer):
        tol_k = max(cfg.newton_tol_floor, 10.0 ** (-(k + 1)))
        report.sigma_history.append(sigma)
        oracle = make_subproblem_oracle(p, lam, sigma)
        w, stats = newton_solve(oracle, w, tol_k, cfg)
        if stats.hit_iteration_cap:
            report.warnings.append(
                f"outer {k}: Newton iteration cap reached at "
                f"|grad|={stats.final_grad_norm:.3e} (target {tol_k:.1e})"
            )
        report.it_sn += stats.iterations
        report.it_cg += stats.cg_iterations_total
        report.active_set_history.extend(stats.active_set_sizes)
        report.grad_norm_history.append(list(stats.grad_norms))
        report.newton_iters_per_outer.append(stats.iterations)
        report.inner_grad_norms.append(stats.final_grad_norm)
        report.inner_tols.append(tol_k)

        z = _z_of(p, w, lam, sigma)
        s = _prox(p, z, 1.0 / sigma)
        lam = sigma * (z - s)
        _check_finite(w, s, lam)

        report.k = k + 1
        r1, r2, r3 = kkt_residual(p, w, s, lam)
        report.kkt_residual = max(r1, r2, r3)
        pv = primal_objective(p, w)
        dv, _ = dual_objective(p, lam)
        report.primal_history.append(pv)
        report.dual_history.append(dv)

        sigma = min(cfg.sigma_max, sigma / cfg.theta)
        if report.kkt_residual <= cfg.tol:
            break
    report.time_seconds = time.perf_counter() - t0
    report.objective = report.primal_history[-1]
    report.duality_gap = report.primal_history[-1] - report.dual_history[-1]
    report.duality_gap_rel = report.duality_gap / (
        1.0 + abs(report.primal_history[-1]) + abs(report.dual_history[-1])
    )
    return w, report
