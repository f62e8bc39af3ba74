import math

import numpy as np
import pytest

from ghs.errors import ParameterError
from ghs.gibbs import GhsConfig
from ghs.samplers import RngHandle
from ghs.shrinkage import (
    C1,
    C2,
    BiasCheckInput,
    empirical_shrinkage_check,
    ls_column_estimate,
    ls_scale_factor_samples,
    shrinkage_bound,
)
from ghs.structures import GroundTruth, gen_structure, simulate_data
from ghs.linalg import symmetrize
from ghs.structures import StructureKind, StructureSpec


def single_edge_truth(p, j, value, corner=1.0, diag=1.0):
    """Ground truth with a lone nonzero entry at (p-1, j)."""
    omega = np.eye(p) * diag
    omega[p - 1, p - 1] = corner
    omega[p - 1, j] = omega[j, p - 1] = value
    sigma = symmetrize(np.linalg.inv(omega))
    adj = (omega != 0.0) & ~np.eye(p, dtype=bool)
    return GroundTruth(omega0=omega, sigma0=sigma, adjacency0=adj,
                       nonzero_count=1)


class TestShrinkageBound:
    def test_constants(self):
        assert C1 == pytest.approx(1.0 - 2.0 / math.e)
        assert C1 == pytest.approx(0.2642, abs=5e-5)
        assert C2 == 0.75

    def test_reference_arithmetic(self):
        # w=2, theta=1, c1=0.2642, c2=0.75: 4 * 1.0142 * 3 / 16
        val = shrinkage_bound(BiasCheckInput(2.0, 1.0, c1=0.2642, c2=0.75))
        assert val == pytest.approx(4.0 * 1.0142 * 3.0 / 16.0, rel=1e-12)
        assert val == pytest.approx(0.7607, abs=5e-4)

    def test_decreasing_in_signal(self):
        assert shrinkage_bound(BiasCheckInput(3.0, 1.0)) < shrinkage_bound(
            BiasCheckInput(2.0, 1.0)
        )

    def test_linear_in_theta(self):
        one = shrinkage_bound(BiasCheckInput(2.0, 0.3))
        two = shrinkage_bound(BiasCheckInput(2.0, 0.6))
        assert two == pytest.approx(2.0 * one)

    def test_precondition(self):
        with pytest.raises(ParameterError):
            shrinkage_bound(BiasCheckInput(1.4, 1.0))  # w^2/2 = 0.98

    def test_theta_positive(self):
        with pytest.raises(ParameterError):
            BiasCheckInput(2.0, 0.0)

    def test_matches_independent_rederivation(self):
        # same quantity accumulated in a different order, term by term
        g = np.random.Generator(np.random.PCG64(0))
        for _ in range(10):
            w = float(g.uniform(1.5, 6.0))
            theta = float(g.uniform(0.01, 3.0))
            expected = (4.0 * (C1 + C2) * theta / w**4
                        + 2.0 * (C1 + C2) * theta / w**2)
            assert shrinkage_bound(BiasCheckInput(w, theta)) == pytest.approx(
                expected, rel=1e-12
            )


class TestLeastSquares:
    def test_recovers_truth_at_large_n(self):
        gt = single_edge_truth(5, 2, 0.4)
        y = simulate_data(gt, 200_000, RngHandle(1))
        ls, _ = ls_column_estimate(y, gt.omega0[4, 4])
        assert abs(ls[2] - 0.4) <= 0.02
        assert np.max(np.abs(np.delete(ls, 2))) <= 0.02

    def test_needs_enough_rows(self):
        with pytest.raises(ParameterError):
            ls_column_estimate(np.ones((3, 5)), 1.0)

    def test_scale_factor_gamma_law_reduced(self):
        # 1 / (X'X)^{-1}_jj over replications is Gamma((n-p+2)/2) with
        # scale 2 / (w_jj0 - w_pj0^2 / w_pp0); moment check at 2000 reps
        gt = single_edge_truth(6, 1, 0.5, corner=2.0)
        n, j, reps = 40, 1, 2000
        draws = ls_scale_factor_samples(gt, n, j, RngHandle(2), reps)
        shape = (n - 6 + 2) / 2.0
        scale = 2.0 / (gt.omega0[j, j] - gt.omega0[5, j] ** 2 / gt.omega0[5, 5])
        mean = shape * scale
        sd = np.sqrt(shape) * scale
        assert abs(draws.mean() - mean) <= 4.0 * sd / np.sqrt(reps)
        assert abs(draws.var(ddof=1) / (shape * scale**2) - 1.0) <= 0.15


class TestEmpiricalCheck:
    def test_strong_signal_within_bound(self):
        gt = single_edge_truth(10, 3, 0.5)
        rep = empirical_shrinkage_check(
            gt, 200, 3, seed=11, config=GhsConfig(burnin=200, nmc=1000),
        )
        assert not rep.skipped
        assert rep.bound is not None
        assert rep.ls_estimate_scaled**2 / 2.0 > 1.0
        assert rep.passed

    def test_zero_entry_skipped(self):
        # with omega_pj0 = 0 the scaled signal is typically too weak
        gt = single_edge_truth(10, 3, 0.0)
        gt.adjacency0[:] = False
        gt.nonzero_count = 0
        rep = empirical_shrinkage_check(
            gt, 200, 7, seed=1, config=GhsConfig(burnin=100, nmc=400),
        )
        assert rep.skipped
        assert rep.bound is None
        assert rep.passed

    def test_theta_target_must_allow_bound(self):
        gt = single_edge_truth(10, 3, 0.5)
        with pytest.raises(ParameterError):
            empirical_shrinkage_check(gt, 200, 3, seed=0, theta_target=0.5)

    def test_invalid_j(self):
        gt = single_edge_truth(10, 3, 0.5)
        with pytest.raises(ParameterError):
            empirical_shrinkage_check(gt, 200, 9, seed=0)
