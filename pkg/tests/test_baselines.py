"""The Riemannian subgradient ascent baseline."""

import jsonschema
import numpy as np
import pytest

import oracles
from fairpca import (
    GroupedDataset,
    ky_fan_norm,
    min_objective,
    random_stiefel,
    REPORT_SCHEMA,
    RSGParams,
    rsg_step,
    solve_rsg,
)


def two_group_dataset(seed=0, d=6, sizes=(8, 8)):
    rng = np.random.default_rng(seed)
    return GroupedDataset(X=rng.standard_normal((d, sum(sizes))),
                          group_sizes=sizes)


class TestStep:
    def test_matches_hand_transcription(self):
        data = GroupedDataset(
            X=np.array([[1.1, -0.2], [0.3, 0.8], [-0.5, 0.6]]),
            group_sizes=(1, 1))
        U = random_stiefel(3, 1, seed=13)
        for k in (1, 2, 7):
            np.testing.assert_allclose(
                rsg_step(U, data, c=0.3, k=k),
                oracles.rsg_step_by_hand(data.X, data.group_sizes, U, 0.3, k),
                atol=1e-12)

    def test_ties_break_toward_lowest_index(self):
        x = np.array([[0.7], [0.4]])
        data = GroupedDataset(X=np.hstack([x, x]), group_sizes=(1, 1))
        single = GroupedDataset(X=x, group_sizes=(1,))
        U = random_stiefel(2, 1, seed=5)
        np.testing.assert_allclose(rsg_step(U, data, c=0.2, k=3),
                                   rsg_step(U, single, c=0.2, k=3),
                                   atol=1e-14)

    def test_stays_on_manifold_even_with_large_steps(self):
        data = two_group_dataset(seed=1)
        U = random_stiefel(6, 3, seed=1)
        from fairpca import orthonormality_error
        for k in range(1, 40):
            U = rsg_step(U, data, c=10.0, k=k)
            assert orthonormality_error(U) <= 1e-12

    def test_rejects_bad_arguments(self):
        data = two_group_dataset()
        U = random_stiefel(6, 2, seed=0)
        with pytest.raises(ValueError):
            rsg_step(U, data, c=0.0, k=1)
        with pytest.raises(ValueError):
            rsg_step(U, data, c=1.0, k=0)


class TestParams:
    def test_validation(self):
        RSGParams(c=0.1)
        with pytest.raises(ValueError):
            RSGParams(c=0.0)
        with pytest.raises(ValueError):
            RSGParams(c=1.0, max_iters=-1)
        with pytest.raises(ValueError):
            RSGParams(c=1.0, trace_stride=0)


class TestSolve:
    def test_deterministic_given_seed(self):
        data = two_group_dataset(seed=2)
        params = RSGParams(c=0.1, max_iters=150, seed=4, trace_stride=25)
        a = solve_rsg(data, 2, params)
        b = solve_rsg(data, 2, params)
        np.testing.assert_array_equal(a.U, b.U)
        assert a.phi == b.phi
        assert [t.k for t in a.trace] == [t.k for t in b.trace]
        assert [t.phi for t in a.trace] == [t.phi for t in b.trace]

    def test_reference_already_met_stops_before_stepping(self):
        data = two_group_dataset(seed=3)
        start_phi = min_objective(data, random_stiefel(6, 2, seed=7))
        res = solve_rsg(data, 2, RSGParams(c=0.5, seed=7,
                                           reference_phi=start_phi))
        assert res.converged
        assert res.iterations == 0
        assert res.phi == pytest.approx(start_phi)
        assert [t.k for t in res.trace] == [0]

    def test_cap_and_trace_layout(self):
        data = two_group_dataset(seed=4)
        res = solve_rsg(data, 2, RSGParams(c=0.1, max_iters=130, seed=0,
                                           trace_stride=50))
        assert not res.converged
        assert res.iterations == 130
        assert [t.k for t in res.trace] == [0, 50, 100, 130]
        assert res.trace[0].zeta is None
        assert res.trace[1].zeta == pytest.approx(0.1 / np.sqrt(50))
        assert res.algorithm == "rsg"
        assert res.y is None
        assert res.max_orth_error <= 1e-10

    def test_ascent_makes_progress(self):
        data = two_group_dataset(seed=5)
        res = solve_rsg(data, 2, RSGParams(c=0.1, max_iters=2000, seed=1))
        assert res.phi > res.trace[0].phi

    def test_phi_bounded_by_best_single_group_variance(self):
        data = two_group_dataset(seed=6)
        res = solve_rsg(data, 2, RSGParams(c=0.2, max_iters=500, seed=2))
        cap = min(ky_fan_norm(data.group(i) @ data.group(i).T, 2)
                  for i in range(data.num_groups))
        assert res.phi <= cap + 1e-9

    def test_records_subgradient_distance_when_asked(self):
        data = two_group_dataset(seed=7)
        res = solve_rsg(data, 2, RSGParams(c=0.1, max_iters=60, seed=3,
                                           trace_stride=30, record_dist=True))
        assert all(t.dist_subgrad is not None for t in res.trace)
        assert all(t.dist_subgrad >= 0.0 for t in res.trace)
        assert all("dist_subgrad" in t.to_row() for t in res.trace)

    def test_report_validates_against_schema(self):
        data = two_group_dataset(seed=8)
        res = solve_rsg(data, 2, RSGParams(c=0.1, max_iters=40, seed=0,
                                           trace_stride=10))
        report = res.to_report(params={"c": 0.1}, dataset_meta={})
        jsonschema.validate(report, REPORT_SCHEMA)
