"""The alternating descent-ascent solver: schedules, steps, full runs."""

import json

import jsonschema
import numpy as np
import pytest

import oracles
from fairpca import (
    ARPGDAParams,
    DegenerateProblemError,
    GroupedDataset,
    NumericalError,
    REPORT_SCHEMA,
    Schedules,
    SmoothnessConstants,
    arpgda_step,
    initial_state,
    make_schedules,
    recommended_params,
    smoothness_constants,
    solve_arpgda,
)
from fairpca import arpgda as arpgda_module


def small_dataset(seed=0, d=6, sizes=(2, 3, 2)):
    rng = np.random.default_rng(seed)
    return GroupedDataset(X=rng.standard_normal((d, sum(sizes))),
                          group_sizes=sizes)


class TestParams:
    def test_validation(self):
        ARPGDAParams(epsilon=0.1, mu=1.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.0, mu=1.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=-1.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=1.0, rho=1.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=1.0, theta=2.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=1.0, radius=0.0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=1.0, max_iters=0)
        with pytest.raises(ValueError):
            ARPGDAParams(epsilon=0.1, mu=1.0, trace_stride=0)

    def test_recommended_singleton_regime(self):
        X = np.array([[1.0, 2.0, 0.5], [0.0, 1.0, 1.0]])
        data = GroupedDataset(X=X, group_sizes=(1, 1, 1))
        p = recommended_params(data, 2)
        assert p.epsilon == pytest.approx(1e-3 * 5.0)  # max ||x||^2 = 5
        assert (p.rho, p.theta) == (1.1, 1.5)
        assert p.mu == pytest.approx(30.0 * 9 * np.sqrt(2.0))

    def test_recommended_block_regime(self):
        data = small_dataset(sizes=(2, 3))
        p = recommended_params(data, 3)
        assert p.epsilon == pytest.approx(1e-3)
        assert (p.rho, p.theta) == (1.01, 1.99)
        assert p.mu == pytest.approx(200.0 * 4 * np.sqrt(3.0))

    def test_degenerate_data_rejected(self):
        data = GroupedDataset(X=np.zeros((3, 2)), group_sizes=(1, 1))
        with pytest.raises(DegenerateProblemError):
            recommended_params(data, 1)
        with pytest.raises(DegenerateProblemError):
            solve_arpgda(data, 1, ARPGDAParams(epsilon=0.1, mu=1.0))


class TestSchedules:
    def test_fixed_values(self):
        sched = make_schedules(
            ARPGDAParams(epsilon=0.008, mu=7.0, rho=1.1, theta=1.5),
            SmoothnessConstants(L1=2.0, L2=3.0))
        assert sched.lam == pytest.approx(0.001, rel=1e-15)
        assert sched.beta(1) == pytest.approx(7.0, rel=1e-15)
        assert sched.beta(2) == pytest.approx(3.265615470378826, rel=1e-13)
        assert sched.zeta(1) == pytest.approx(0.5214439028516656, rel=1e-13)
        assert sched.zeta(2) == pytest.approx(0.40761016678740986, rel=1e-13)

    def test_radius_enters_lambda(self):
        sched = make_schedules(
            ARPGDAParams(epsilon=0.008, mu=7.0, radius=2.0),
            SmoothnessConstants(L1=2.0, L2=3.0))
        assert sched.lam == pytest.approx(0.008 / 32.0)

    def test_monotonicity(self):
        sched = make_schedules(
            ARPGDAParams(epsilon=0.01, mu=50.0, rho=1.3, theta=1.2),
            SmoothnessConstants(L1=4.0, L2=6.0))
        betas = [sched.beta(k) for k in range(1, 30)]
        zetas = [sched.zeta(k) for k in range(1, 30)]
        assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))
        assert all(z1 > z2 for z1, z2 in zip(zetas, zetas[1:]))
        assert all(z < sched.theta / sched.L1 for z in zetas)

    def test_zero_variance_data_rejected(self):
        with pytest.raises(DegenerateProblemError):
            make_schedules(ARPGDAParams(epsilon=0.1, mu=1.0),
                           SmoothnessConstants(L1=0.0, L2=0.0))


class TestStep:
    def test_matches_hand_transcription(self):
        data = GroupedDataset(
            X=np.array([[0.9, -0.3], [0.1, 1.2], [-0.7, 0.4]]),
            group_sizes=(1, 1))
        params = ARPGDAParams(epsilon=0.05, mu=3.0, rho=1.2, theta=1.4, seed=11)
        sched = make_schedules(params, smoothness_constants(data, 1))
        state = initial_state(data, 1, params.seed)
        nxt = arpgda_step(state, sched, data)
        U_hand, y_hand = oracles.arpgda_step_by_hand(
            data.X, data.group_sizes, state.U, state.y,
            lam=sched.lam, beta_k=sched.beta(1), zeta_k=sched.zeta(1))
        np.testing.assert_allclose(nxt.U, U_hand, atol=1e-12)
        np.testing.assert_allclose(nxt.y, y_hand, atol=1e-12)
        np.testing.assert_allclose(nxt.y_prev, state.y, atol=0)

    def test_two_steps_match_hand_transcription(self):
        data = small_dataset(seed=1, d=5, sizes=(2, 2, 1))
        params = ARPGDAParams(epsilon=0.05, mu=2.0, seed=4)
        sched = make_schedules(params, smoothness_constants(data, 2))
        state = initial_state(data, 2, params.seed)
        U, y = state.U, state.y
        for k in (1, 2):
            state = arpgda_step(state, sched, data)
            U, y = oracles.arpgda_step_by_hand(
                data.X, data.group_sizes, U, y,
                lam=sched.lam, beta_k=sched.beta(k), zeta_k=sched.zeta(k))
            np.testing.assert_allclose(state.U, U, atol=1e-11)
            np.testing.assert_allclose(state.y, y, atol=1e-11)

    def test_rejects_non_finite_gradient(self):
        data = small_dataset()
        params = ARPGDAParams(epsilon=0.05, mu=2.0)
        sched = make_schedules(params, smoothness_constants(data, 2))
        state = initial_state(data, 2, 0)
        state.grad[0, 0] = np.nan
        with pytest.raises(NumericalError):
            arpgda_step(state, sched, data)


class TestSolve:
    def test_deterministic_given_seed(self):
        data = small_dataset(seed=5, d=8, sizes=(3, 3, 2))
        params = ARPGDAParams(epsilon=1e-4, mu=40.0, max_iters=300, seed=9)
        a = solve_arpgda(data, 2, params)
        b = solve_arpgda(data, 2, params)
        np.testing.assert_array_equal(a.U, b.U)
        np.testing.assert_array_equal(a.y, b.y)
        assert a.phi == b.phi
        assert a.iterations == b.iterations
        assert [t.k for t in a.trace] == [t.k for t in b.trace]
        assert [t.phi for t in a.trace] == [t.phi for t in b.trace]
        assert [t.stationarity for t in a.trace] == [t.stationarity for t in b.trace]

    def test_single_group_reduces_to_pca(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((8, 12))
        data = GroupedDataset(X=X, group_sizes=(12,))
        params = ARPGDAParams(epsilon=1e-4, mu=1e8, rho=1.01, theta=1.5,
                              max_iters=20_000, seed=3)
        res = solve_arpgda(data, 2, params)
        assert res.converged
        np.testing.assert_array_equal(res.y, np.array([1.0]))
        top2 = oracles.top_eigenvalue_sum(X, 2)
        assert res.phi == pytest.approx(top2, rel=1e-6)
        assert not res.violations

    def test_weights_concentrate_on_disadvantaged_group(self):
        rng = np.random.default_rng(6)
        base = rng.standard_normal((5, 10))
        data = GroupedDataset(X=np.hstack([base, 3.0 * base]),
                              group_sizes=(10, 10))
        params = recommended_params(data, 2, max_iters=2000)
        res = solve_arpgda(data, 2, params)
        # group 1 always has the smaller variance, so it carries the weight
        assert res.y[0] > 0.9
        assert not res.violations

    def test_feasibility_and_bookkeeping(self):
        data = small_dataset(seed=7)
        params = ARPGDAParams(epsilon=1e-3, mu=30.0, max_iters=500, seed=1,
                              trace_stride=50)
        res = solve_arpgda(data, 2, params)
        assert res.algorithm == "arpgda"
        assert res.max_orth_error <= 1e-8
        assert res.info["max_simplex_error"] <= 1e-12
        assert res.iterations == res.trace[-1].k
        ks = [t.k for t in res.trace]
        assert ks == sorted(ks)
        for t in res.trace[:-1]:
            assert t.k % 50 == 0
        if res.converged:
            assert res.stationarity <= params.epsilon
        assert res.info["L1"] > 0
        assert set(res.trace[0].to_row()) == {
            "k", "phi", "E", "grad_norm", "gap", "lambda", "beta", "zeta", "ms"}

    def test_report_validates_against_schema(self):
        data = small_dataset(seed=3)
        params = ARPGDAParams(epsilon=1e-3, mu=10.0, max_iters=50, seed=2,
                              trace_stride=10)
        res = solve_arpgda(data, 2, params)
        report = res.to_report(params={"epsilon": params.epsilon},
                               dataset_meta={"name": data.name})
        jsonschema.validate(report, REPORT_SCHEMA)
        json.dumps(report)  # must be serializable as-is

    def test_violations_are_detected_and_warned(self, monkeypatch):
        class BrokenSchedules(Schedules):
            def zeta(self, k):
                return 250.0  # absurd stepsize: sufficient decrease must fail

        def broken(params, constants):
            return BrokenSchedules(lam=params.epsilon / 8.0, mu=params.mu,
                                   rho=params.rho, theta=params.theta,
                                   L1=constants.L1, L2=constants.L2)

        monkeypatch.setattr(arpgda_module, "make_schedules", broken)
        data = small_dataset(seed=8)
        params = ARPGDAParams(epsilon=1e-6, mu=5.0, max_iters=10, seed=0)
        with pytest.warns(RuntimeWarning):
            res = solve_arpgda(data, 2, params)
        assert res.violations
        kinds = {v.kind for v in res.violations}
        assert "sufficient_decrease" in kinds
        row = res.violations[0].to_row()
        assert row["lhs"] > row["rhs"]

    def test_numerical_error_on_broken_projection(self):
        data = small_dataset(seed=9)
        params = ARPGDAParams(epsilon=1e-6, mu=5.0, max_iters=10, seed=0)
        with pytest.raises(NumericalError):
            solve_arpgda(data, 2, params,
                         project_y=lambda z: np.full_like(z, np.nan))

    def test_cap_reached_reports_not_converged(self):
        data = small_dataset(seed=10)
        params = ARPGDAParams(epsilon=1e-12, mu=10.0, max_iters=25, seed=0)
        res = solve_arpgda(data, 2, params)
        assert not res.converged
        assert res.iterations == 25
        assert res.trace[-1].k == 25
