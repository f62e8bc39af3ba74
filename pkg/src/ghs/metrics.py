"""Loss functions, selection-quality statistics, and ROC construction."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionError, NumericalError, ParameterError
from .gibbs import Chain, credible_interval_select

#: Grid of credible-interval widths used for ROC curves: 1% to 99% in 1% steps.
ROC_LEVELS = tuple(round(0.01 * k, 2) for k in range(1, 100))


@dataclass
class LossReport:
    steins_loss: float
    frobenius: float


@dataclass
class ConfusionReport:
    """Counts and rates over strict upper-triangle pairs.

    ``tpr`` equals sensitivity and ``fpr`` equals 1 - specificity.
    ``undefined_tpr`` flags an empty positive class (no true edges), in
    which case tpr/sensitivity are reported as 0.
    """

    tp: int
    fp: int
    tn: int
    fn: int
    tpr: float
    fpr: float
    sensitivity: float
    specificity: float
    precision: float
    accuracy: float
    undefined_tpr: bool = False


@dataclass
class RocCurve:
    """(fpr, tpr, level) points ordered by decreasing interval width."""

    points: list[tuple[float, float, float]] = field(default_factory=list)
    undefined_tpr: bool = False


def _check_same_square(a: NDArray, b: NDArray) -> int:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"incompatible shapes {a.shape} and {b.shape}")
    return a.shape[0]


def steins_loss(estimate: NDArray, truth: NDArray) -> float:
    """tr(est @ truth^-1) - log det(est @ truth^-1) - p, via Cholesky.

    Equals twice the Kullback-Leibler divergence between the zero-mean
    Gaussians with these precision matrices; zero iff estimate == truth.
    """
    p = _check_same_square(estimate, truth)
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    try:
        c_truth = cho_factor(truth, lower=True)
        l_est = np.linalg.cholesky(estimate)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("inputs must be positive definite") from exc
    tr = float(np.trace(cho_solve(c_truth, estimate)))
    logdet_est = 2.0 * float(np.sum(np.log(np.diag(l_est))))
    logdet_truth = 2.0 * float(np.sum(np.log(np.diag(c_truth[0]))))
    return tr - (logdet_est - logdet_truth) - p


def frobenius_error(estimate: NDArray, truth: NDArray) -> float:
    """Entrywise l2 norm of the difference, over all p^2 entries."""
    _check_same_square(estimate, truth)
    return float(np.linalg.norm(np.asarray(estimate) - np.asarray(truth)))


def loss_report(estimate: NDArray, truth: NDArray) -> LossReport:
    return LossReport(
        steins_loss=steins_loss(estimate, truth),
        frobenius=frobenius_error(estimate, truth),
    )


def confusion(selected: NDArray, truth_adj: NDArray) -> ConfusionReport:
    """Selection-quality counts over the strict upper triangle.

    Precision is 0 by convention when there are no discoveries; tpr is 0
    (flagged) when there are no true edges.
    """
    p = _check_same_square(selected, truth_adj)
    selected = np.asarray(selected, dtype=bool)
    truth_adj = np.asarray(truth_adj, dtype=bool)
    for name, m in (("selected", selected), ("truth", truth_adj)):
        if not np.array_equal(m, m.T):
            raise DimensionError(f"{name} adjacency is not symmetric")
        if np.any(np.diag(m)):
            raise DimensionError(f"{name} adjacency has a true diagonal entry")
    iu = np.triu_indices(p, k=1)
    sel = selected[iu]
    tru = truth_adj[iu]
    tp = int(np.sum(sel & tru))
    fp = int(np.sum(sel & ~tru))
    fn = int(np.sum(~sel & tru))
    tn = int(np.sum(~sel & ~tru))
    total = tp + fp + fn + tn
    undefined_tpr = (tp + fn) == 0
    tpr = tp / (tp + fn) if not undefined_tpr else 0.0
    fpr = fp / (fp + tn) if (fp + tn) > 0 else 0.0
    return ConfusionReport(
        tp=tp, fp=fp, tn=tn, fn=fn,
        tpr=tpr, fpr=fpr,
        sensitivity=tpr,
        specificity=1.0 - fpr,
        precision=tp / (tp + fp) if (tp + fp) > 0 else 0.0,
        accuracy=(tp + tn) / total if total > 0 else 0.0,
        undefined_tpr=undefined_tpr,
    )


def roc_from_chain(chain: Chain, truth_adj: NDArray) -> RocCurve:
    """ROC by sweeping the credible-interval width over :data:`ROC_LEVELS`.

    Narrower intervals select more edges, so points are ordered from the
    widest interval (fewest discoveries) to the narrowest.
    """
    curve = RocCurve()
    p = chain.p
    truth_adj = np.asarray(truth_adj, dtype=bool)
    iu = np.triu_indices(p, k=1)
    tru = truth_adj[iu]
    n_pos = int(np.sum(tru))
    n_neg = len(tru) - n_pos
    curve.undefined_tpr = n_pos == 0

    vals = chain.offdiag_draws()
    qs = []
    for level in ROC_LEVELS:
        qs.extend([(1.0 - level) / 2.0, (1.0 + level) / 2.0])
    quants = np.quantile(vals, qs, axis=0, method="linear")
    for k, level in enumerate(reversed(ROC_LEVELS)):
        idx = (len(ROC_LEVELS) - 1 - k) * 2
        lo, hi = quants[idx], quants[idx + 1]
        sel = (lo > 0.0) | (hi < 0.0)
        tp = int(np.sum(sel & tru))
        fp = int(np.sum(sel & ~tru))
        tpr = tp / n_pos if n_pos else 0.0
        fpr = fp / n_neg if n_neg else 0.0
        curve.points.append((fpr, tpr, level))
    return curve


def selection_at_level(chain: Chain, truth_adj: NDArray, level: float) -> ConfusionReport:
    """Convenience: credible-interval selection followed by confusion counts."""
    return confusion(credible_interval_select(chain, level), np.asarray(truth_adj, dtype=bool))
