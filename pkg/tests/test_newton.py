"""CG and the globalized Newton loop."""

import math

import numpy as np
import pytest

import almsvm.newton as newton_mod
from almsvm.alm import SolverConfig, build_svc, make_subproblem_oracle
from almsvm.newton import SubproblemOracle, cg_solve, newton_solve
from almsvm.synthetic import svc_blobs


class TestCgSolve:
    def test_identity_one_iteration(self):
        x, iters = cg_solve(lambda v: v, np.array([2.0, -3.0]), 1e-12, 10)
        np.testing.assert_allclose(x, [2.0, -3.0])
        assert iters == 1

    def test_diagonal_two_iterations(self):
        a = np.diag([2.0, 4.0])
        x, iters = cg_solve(lambda v: a @ v, np.array([2.0, 4.0]), 1e-12, 10)
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)
        assert iters <= 2

    def test_random_spd_against_direct_solve(self, rng):
        a = rng.normal(size=(20, 20))
        spd = a @ a.T + 20 * np.eye(20)
        rhs = rng.normal(size=20)
        x, _ = cg_solve(lambda v: spd @ v, rhs, 1e-10, 200)
        np.testing.assert_allclose(x, np.linalg.solve(spd, rhs), rtol=1e-8)

    def test_zero_rhs(self):
        x, iters = cg_solve(lambda v: v, np.zeros(3), 1e-12, 10)
        np.testing.assert_array_equal(x, np.zeros(3))
        assert iters == 0

    def test_truncation_at_maxit(self, rng):
        a = rng.normal(size=(30, 30))
        spd = a @ a.T + np.eye(30)
        x, iters = cg_solve(lambda v: spd @ v, rng.normal(size=30), 1e-14, 3)
        assert iters == 3
        assert np.all(np.isfinite(x))


def _quadratic_oracle(n):
    return SubproblemOracle(
        n=n,
        value=lambda w: 0.5 * float(w @ w),
        grad=lambda w: w.copy(),
        active_set=lambda w: np.array([], dtype=np.int64),
        hvp=lambda rows, h: h.copy(),
    )


class TestNewtonSolve:
    def test_quadratic_single_step(self, rng):
        w0 = rng.normal(size=6) * 10
        w, stats = newton_solve(_quadratic_oracle(6), w0, 1e-10, SolverConfig())
        assert stats.iterations == 1
        assert np.linalg.norm(w) <= 1e-10

    def test_already_optimal_returns_immediately(self):
        w, stats = newton_solve(_quadratic_oracle(4), np.zeros(4), 1e-8,
                                SolverConfig())
        assert stats.iterations == 0
        assert stats.final_grad_norm == 0.0
        np.testing.assert_array_equal(w, np.zeros(4))

    def test_superlinear_tail_on_svc_subproblem(self):
        data = svc_blobs(200, 10, separation=2.0, scale=1.0, seed=7)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.15)
        _, stats = newton_solve(oracle, np.ones(p.n), 1e-10, SolverConfig())
        g = stats.grad_norms
        checked = 0
        for j in range(len(g) - 1):
            if g[j] <= 1e-2 and g[j] > 0:
                assert g[j + 1] <= max(g[j] ** 1.5, 5e-14)
                checked += 1
        assert checked >= 1

    def test_monotone_descent_and_step_form(self):
        data = svc_blobs(60, 4, separation=1.0, scale=1.0, seed=5)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.15)
        values = []
        inner_grad = oracle.grad

        def logging_grad(w):
            values.append(oracle.value(w))
            return inner_grad(w)

        logged = SubproblemOracle(n=oracle.n, value=oracle.value,
                                  grad=logging_grad,
                                  active_set=oracle.active_set, hvp=oracle.hvp)
        _, stats = newton_solve(logged, np.ones(p.n), 1e-8, SolverConfig())
        assert all(b < a for a, b in zip(values, values[1:]))
        for alpha in stats.step_sizes:
            assert 0.0 < alpha <= 1.0
            exponent = math.log(alpha, 0.5)
            assert exponent == pytest.approx(round(exponent), abs=1e-12)

    def test_returned_gradient_below_tolerance(self):
        data = svc_blobs(60, 4, separation=1.0, scale=1.0, seed=6)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.3)
        _, stats = newton_solve(oracle, np.ones(p.n), 1e-7, SolverConfig())
        assert not stats.hit_iteration_cap
        assert stats.final_grad_norm <= 1e-7

    def test_iteration_cap_flagged(self):
        data = svc_blobs(60, 4, separation=1.0, scale=1.0, seed=6)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.3)
        cfg = SolverConfig(max_newton_per_outer=1)
        _, stats = newton_solve(oracle, np.ones(p.n), 1e-10, cfg)
        assert stats.hit_iteration_cap
        assert stats.iterations == 1

    def test_cg_bookkeeping_matches_per_call_counts(self, monkeypatch):
        calls = []
        real_cg = newton_mod.cg_solve

        def recording_cg(*args, **kwargs):
            x, iters = real_cg(*args, **kwargs)
            calls.append(iters)
            return x, iters

        monkeypatch.setattr(newton_mod, "cg_solve", recording_cg)
        data = svc_blobs(60, 4, separation=1.0, scale=1.0, seed=8)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.15)
        _, stats = newton_solve(oracle, np.ones(p.n), 1e-8, SolverConfig())
        assert stats.cg_iterations_total == sum(calls)
        assert len(calls) == stats.iterations

    def test_non_descent_cg_output_falls_back_to_steepest_descent(self, rng):
        # a broken (non-SPD) curvature operator makes CG bail out with a
        # useless direction; the loop must still converge via the
        # gradient fallback
        broken = SubproblemOracle(
            n=5,
            value=lambda w: 0.5 * float(w @ w),
            grad=lambda w: w.copy(),
            active_set=lambda w: np.array([], dtype=np.int64),
            hvp=lambda rows, h: -h,
        )
        w, stats = newton_solve(broken, rng.normal(size=5), 1e-8,
                                SolverConfig())
        assert np.linalg.norm(w) <= 1e-8
        assert not stats.hit_iteration_cap

    def test_inconsistent_oracle_raises_line_search_error(self, rng):
        # gradient claims descent along -w but the value grows that way
        lying = SubproblemOracle(
            n=3,
            value=lambda w: float(w @ w),
            grad=lambda w: -w,
            active_set=lambda w: np.array([], dtype=np.int64),
            hvp=lambda rows, h: h.copy(),
        )
        with pytest.raises(newton_mod.LineSearchError):
            newton_solve(lying, np.ones(3), 1e-10, SolverConfig())

    def test_history_lengths_consistent(self):
        data = svc_blobs(40, 3, separation=1.0, scale=1.0, seed=9)
        p = build_svc(data, 550.0 / data.m)
        oracle = make_subproblem_oracle(p, np.zeros(p.m), 0.15)
        _, stats = newton_solve(oracle, np.ones(p.n), 1e-8, SolverConfig())
        assert len(stats.step_sizes) == stats.iterations
        assert len(stats.active_set_sizes) == stats.iterations
        assert len(stats.grad_norms) == stats.iterations + 1
