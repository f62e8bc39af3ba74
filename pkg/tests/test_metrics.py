import numpy as np
import pytest

from ghs.errors import DimensionError, NumericalError
from ghs.gibbs import Chain, GhsConfig
from ghs.linalg import symmetrize
from ghs.metrics import (
    ROC_LEVELS,
    confusion,
    frobenius_error,
    loss_report,
    roc_from_chain,
    selection_at_level,
    steins_loss,
)

from conftest import random_pd


def adjacency(p, pairs):
    adj = np.zeros((p, p), dtype=bool)
    for i, j in pairs:
        adj[i, j] = adj[j, i] = True
    return adj


def chain_of(draws):
    draws = np.asarray(draws, dtype=float)
    return Chain(p=draws.shape[1], config=GhsConfig(burnin=0, nmc=len(draws)),
                 rng_seed=0, draws=draws, mean=draws.mean(axis=0))


class TestSteinsLoss:
    def test_equal_inputs_zero(self):
        m = np.array([[2.0, 0.3], [0.3, 1.0]])
        assert steins_loss(m, m) == pytest.approx(0.0, abs=1e-12)

    def test_closed_form_2i_vs_i(self):
        expected = 4.0 - 2.0 * np.log(2.0) - 2.0
        assert steins_loss(2.0 * np.eye(2), np.eye(2)) == pytest.approx(expected)

    def test_affine_invariance(self):
        g = np.random.Generator(np.random.PCG64(1))
        est, tru = random_pd(g, 4), random_pd(g, 4)
        a = g.standard_normal((4, 4)) + 2.0 * np.eye(4)
        lhs = steins_loss(symmetrize(a @ est @ a.T), symmetrize(a @ tru @ a.T))
        assert abs(lhs - steins_loss(est, tru)) <= 1e-8

    def test_nonnegative_fuzz(self):
        g = np.random.Generator(np.random.PCG64(2))
        for _ in range(1000):
            p = int(g.integers(2, 7))
            est, tru = random_pd(g, p), random_pd(g, p)
            loss = steins_loss(est, tru)
            assert loss >= 0.0
            assert loss > 1e-10 or np.max(np.abs(est - tru)) < 1e-4

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            steins_loss(np.eye(2), np.eye(3))

    def test_non_pd_input(self):
        with pytest.raises(NumericalError):
            steins_loss(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))


class TestFrobeniusError:
    def test_zero(self):
        assert frobenius_error(np.eye(3), np.eye(3)) == 0.0

    def test_single_offdiag_pair(self):
        est = np.eye(3)
        est[0, 1] = est[1, 0] = 0.3
        assert frobenius_error(est, np.eye(3)) == pytest.approx(np.sqrt(0.18))

    def test_triangle_inequality(self):
        g = np.random.Generator(np.random.PCG64(3))
        for _ in range(200):
            a, b, c = (g.standard_normal((3, 3)) for _ in range(3))
            assert frobenius_error(a, c) <= (
                frobenius_error(a, b) + frobenius_error(b, c) + 1e-12
            )

    def test_loss_report_bundles_both(self):
        rep = loss_report(2.0 * np.eye(2), np.eye(2))
        assert rep.frobenius == pytest.approx(np.sqrt(2.0))
        assert rep.steins_loss == pytest.approx(4.0 - 2.0 * np.log(2.0) - 2.0)


class TestConfusion:
    def test_perfect_selection(self):
        truth = adjacency(4, [(0, 1), (2, 3)])
        rep = confusion(truth, truth)
        assert rep.tpr == 1.0 and rep.fpr == 0.0 and rep.accuracy == 1.0
        assert not rep.undefined_tpr

    def test_empty_discoveries(self):
        truth = adjacency(4, [(0, 1)])
        rep = confusion(np.zeros((4, 4), dtype=bool), truth)
        assert rep.tpr == 0.0 and rep.fpr == 0.0 and rep.precision == 0.0

    def test_enumerated_p4_case(self):
        truth = adjacency(4, [(0, 1)])
        sel = adjacency(4, [(0, 1), (2, 3)])
        rep = confusion(sel, truth)
        assert (rep.tp, rep.fp, rep.fn, rep.tn) == (1, 1, 0, 4)
        assert rep.precision == 0.5
        assert rep.accuracy == pytest.approx(5.0 / 6.0)

    def test_rate_identities(self):
        g = np.random.Generator(np.random.PCG64(4))
        for _ in range(100):
            p = int(g.integers(3, 8))
            truth = symmetrize_bool(g.random((p, p)) < 0.4)
            sel = symmetrize_bool(g.random((p, p)) < 0.4)
            rep = confusion(sel, truth)
            if rep.tp + rep.fn:
                assert rep.tpr == rep.tp / (rep.tp + rep.fn)
            if rep.fp + rep.tn:
                assert rep.fpr == rep.fp / (rep.fp + rep.tn)
            total = rep.tp + rep.fp + rep.tn + rep.fn
            assert total == p * (p - 1) // 2
            assert rep.accuracy == (rep.tp + rep.tn) / total
            assert rep.sensitivity == rep.tpr
            assert rep.specificity == 1.0 - rep.fpr

    def test_no_true_edges_flagged(self):
        sel = adjacency(3, [(0, 1)])
        rep = confusion(sel, np.zeros((3, 3), dtype=bool))
        assert rep.undefined_tpr and rep.tpr == 0.0

    def test_asymmetric_rejected(self):
        bad = np.zeros((3, 3), dtype=bool)
        bad[0, 1] = True
        with pytest.raises(DimensionError):
            confusion(bad, np.zeros((3, 3), dtype=bool))

    def test_diagonal_rejected(self):
        bad = np.eye(3, dtype=bool)
        with pytest.raises(DimensionError):
            confusion(bad, np.zeros((3, 3), dtype=bool))


def symmetrize_bool(m):
    m = np.triu(m, k=1)
    return m | m.T


class TestRocFromChain:
    def test_level_grid(self):
        assert len(ROC_LEVELS) == 99
        assert ROC_LEVELS[0] == 0.01 and ROC_LEVELS[-1] == 0.99

    def test_chain_equal_to_truth_pins_corner(self):
        omega = np.eye(3)
        omega[0, 1] = omega[1, 0] = 0.5
        curve = roc_from_chain(chain_of([omega] * 8), adjacency(3, [(0, 1)]))
        assert len(curve.points) == 99
        for fpr, tpr, _ in curve.points:
            assert (fpr, tpr) == (0.0, 1.0)

    def test_monotone_in_decreasing_level(self):
        g = np.random.Generator(np.random.PCG64(5))
        draws = []
        base = np.eye(4) * 2.0
        base[0, 1] = base[1, 0] = 0.4
        for _ in range(200):
            noise = g.standard_normal((4, 4)) * 0.2
            draws.append(symmetrize(base + noise))
        curve = roc_from_chain(chain_of(draws), adjacency(4, [(0, 1), (2, 3)]))
        levels = [lv for _, _, lv in curve.points]
        assert levels == sorted(levels, reverse=True)
        tprs = [t for _, t, _ in curve.points]
        fprs = [f for f, _, _ in curve.points]
        assert all(a <= b + 1e-12 for a, b in zip(tprs, tprs[1:]))
        assert all(a <= b + 1e-12 for a, b in zip(fprs, fprs[1:]))

    def test_all_zero_truth_flag(self):
        curve = roc_from_chain(chain_of([np.eye(3)] * 5),
                               np.zeros((3, 3), dtype=bool))
        assert curve.undefined_tpr
        assert all(t == 0.0 for _, t, _ in curve.points)

    def test_selection_at_level_consistent(self):
        omega = np.eye(3)
        omega[0, 1] = omega[1, 0] = 0.5
        chain = chain_of([omega] * 8)
        rep = selection_at_level(chain, adjacency(3, [(0, 1)]), 0.5)
        assert rep.tpr == 1.0 and rep.fpr == 0.0
