"""Graphical horseshoe block Gibbs sampler.

Each sweep updates the precision matrix one column/row at a time through
the (beta, gamma) variable change, refreshes the local shrinkage scales
with their inverse-gamma conjugate conditionals, and finally updates the
global scale and its auxiliary variable. The inverse of the precision
matrix is maintained by rank-one block updates and periodically refreshed
to control floating-point drift.
"""

import copy
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_triangular

from .errors import DimensionError, NumericalError, ParameterError
from .linalg import cholesky_pd_check, symmetrize
from .samplers import RngHandle

#: Lower clamp applied to shrinkage scales after sampling; inverse-gamma
#: draws can underflow to 0.0 at extreme conditionals.
SCALE_FLOOR = 1e-300

#: Max-norm drift of Omega @ Sigma - I tolerated before Sigma is recomputed
#: from Omega by direct inversion.
SIGMA_DRIFT_TOL = 1e-6

#: Sigma is unconditionally refreshed every this many sweeps.
SIGMA_REFRESH_EVERY = 100

#: Chains at dimensions above this keep moment accumulators and a
#: per-entry reservoir instead of full draws.
DENSE_STORAGE_MAX_DIM = 200

RESERVOIR_SIZE = 2048


@dataclass
class GhsConfig:
    """Sampler run-length configuration.

    ``nmc`` is the number of retained draws; the sampler runs
    ``burnin + nmc * thin`` full sweeps and keeps every ``thin``-th
    post-burn-in draw. When ``fixed_tau`` is set, the global scale is held
    at that value and never resampled.
    """

    burnin: int = 500
    nmc: int = 1000
    thin: int = 1
    fixed_tau: float | None = None

    def __post_init__(self):
        if self.burnin < 0:
            raise ParameterError(f"burnin must be >= 0, got {self.burnin}")
        if self.nmc < 1:
            raise ParameterError(f"nmc must be >= 1, got {self.nmc}")
        if self.thin < 1:
            raise ParameterError(f"thin must be >= 1, got {self.thin}")
        if self.fixed_tau is not None and self.fixed_tau <= 0:
            raise ParameterError(f"fixed_tau must be positive, got {self.fixed_tau}")


def default_burnin(p: int) -> int:
    """Burn-in schedule by dimension: 500 up to p=100, 1000 up to 200, 2500 above."""
    if p <= 100:
        return 500
    if p <= 200:
        return 1000
    return 2500


@dataclass
class ShrinkageState:
    """Local scales, their augmentation variables, and the global scale.

    ``lambda_sq`` and ``nu`` are symmetric p x p arrays; diagonals are
    stored as 1 and never used.
    """

    lambda_sq: NDArray
    nu: NDArray
    tau_sq: float
    xi: float

    @classmethod
    def initial(cls, p: int) -> "ShrinkageState":
        return cls(
            lambda_sq=np.ones((p, p)),
            nu=np.ones((p, p)),
            tau_sq=1.0,
            xi=1.0,
        )


@dataclass
class SamplerState:
    """Precision matrix, its tracked inverse, and shrinkage parameters."""

    omega: NDArray
    sigma: NDArray
    shrink: ShrinkageState
    sweep_index: int = 0

    @classmethod
    def initial(cls, p: int) -> "SamplerState":
        return cls(
            omega=np.eye(p),
            sigma=np.eye(p),
            shrink=ShrinkageState.initial(p),
        )

    def copy(self) -> "SamplerState":
        return SamplerState(
            omega=self.omega.copy(),
            sigma=self.sigma.copy(),
            shrink=ShrinkageState(
                lambda_sq=self.shrink.lambda_sq.copy(),
                nu=self.shrink.nu.copy(),
                tau_sq=self.shrink.tau_sq,
                xi=self.shrink.xi,
            ),
            sweep_index=self.sweep_index,
        )


@dataclass
class ChainSketch:
    """Reduced chain storage for large dimensions.

    Keeps a running mean, running second moment, and the upper-triangle
    (including diagonal) values of the draws landing on a fixed reservoir
    of retained-draw indices.
    """

    mean: NDArray
    second_moment: NDArray
    reservoir: NDArray  # (r, n_tri)
    reservoir_indices: NDArray  # sorted retained-draw indices in the reservoir


@dataclass
class Chain:
    """Ordered post-burn-in precision draws plus run metadata.

    ``draws`` has shape (nmc, p, p) when the dimension permits dense
    storage; otherwise it is None and ``sketch`` holds the summaries.
    ``trace`` is the optional per-sweep diagnostic series covering every
    sweep, burn-in included.
    """

    p: int
    config: GhsConfig
    rng_seed: int
    draws: NDArray | None
    mean: NDArray
    sketch: ChainSketch | None = None
    trace: NDArray | None = None

    @property
    def nmc(self) -> int:
        return self.config.nmc

    @property
    def burnin(self) -> int:
        return self.config.burnin

    def offdiag_draws(self) -> NDArray:
        """Draw values for the strict upper-triangle pairs, shape (m, n_pairs).

        In sketch mode only the reservoir rows are available.
        """
        iu = np.triu_indices(self.p, k=1)
        if self.draws is not None:
            return self.draws[:, iu[0], iu[1]]
        tri = np.triu_indices(self.p)
        # columns of the reservoir corresponding to strict upper entries
        strict = tri[0] != tri[1]
        return self.sketch.reservoir[:, strict]


def _tri_flatten(m: NDArray, p: int) -> NDArray:
    iu = np.triu_indices(p)
    return m[iu]


def _update_column_inplace(omega, sigma, lambda_sq, tau_sq, s_mat, n, i, gen,
                           sweep=None):
    """One column/row update of (omega, sigma) in place. Returns nothing.

    Draw order is fixed (gamma first, then the normal vector) so that equal
    generators yield bitwise-equal chains.
    """
    p = omega.shape[0]
    s_ii = s_mat[i, i]
    if s_ii <= 0.0:
        raise NumericalError(
            "non-positive scatter diagonal (zero-variance column)",
            sweep=sweep, column=i,
        )
    gamma = gen.gamma(n / 2.0 + 1.0, 2.0 / s_ii)

    if p == 1:
        omega[0, 0] = gamma
        sigma[0, 0] = 1.0 / gamma
        return

    keep = np.r_[0:i, i + 1 : p]
    sig_block = sigma[np.ix_(keep, keep)]
    sig_col = sigma[keep, i]
    sig_ii = sigma[i, i]
    if sig_ii <= 0.0:
        raise NumericalError(
            "non-positive tracked variance", sweep=sweep, column=i
        )
    inv_block = sig_block - np.outer(sig_col, sig_col) / sig_ii

    s_col = s_mat[keep, i]
    lam = lambda_sq[keep, i]
    prec = s_ii * inv_block
    prec[np.diag_indices_from(prec)] += 1.0 / (lam * tau_sq)
    prec = symmetrize(prec)
    try:
        L = np.linalg.cholesky(prec)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "conditional precision not positive definite", sweep=sweep, column=i
        ) from exc

    # beta ~ Normal(-C s_col, C) with C = prec^{-1}, sampled through the
    # factor of prec: mean by two triangular solves, noise by one back solve.
    w = solve_triangular(L, -s_col, lower=True)
    mean = solve_triangular(L.T, w, lower=False)
    z = gen.standard_normal(p - 1)
    beta = mean + solve_triangular(L.T, z, lower=False)

    omega[keep, i] = beta
    omega[i, keep] = beta
    ob = inv_block @ beta
    omega[i, i] = gamma + beta @ ob

    sigma[np.ix_(keep, keep)] = inv_block + np.outer(ob, ob) / gamma
    sigma[keep, i] = -ob / gamma
    sigma[i, keep] = -ob / gamma
    sigma[i, i] = 1.0 / gamma


def _update_shrinkage_column_inplace(omega, lambda_sq, nu, tau_sq, i, gen):
    """Conjugate refresh of the local scales tied to column ``i``."""
    p = omega.shape[0]
    if p == 1:
        return
    keep = np.r_[0:i, i + 1 : p]
    w = omega[keep, i]
    scale_lam = 1.0 / nu[keep, i] + w**2 / (2.0 * tau_sq)
    lam = 1.0 / gen.gamma(1.0, 1.0 / scale_lam)
    np.clip(lam, SCALE_FLOOR, None, out=lam)
    scale_nu = 1.0 + 1.0 / lam
    new_nu = 1.0 / gen.gamma(1.0, 1.0 / scale_nu)
    np.clip(new_nu, SCALE_FLOOR, None, out=new_nu)
    lambda_sq[keep, i] = lam
    lambda_sq[i, keep] = lam
    nu[keep, i] = new_nu
    nu[i, keep] = new_nu


def _update_global_inplace(shrink: ShrinkageState, omega, gen):
    """Draw tau^2 and xi from their inverse-gamma conditionals."""
    p = omega.shape[0]
    iu = np.triu_indices(p, k=1)
    n_pairs = p * (p - 1) // 2
    shape = (n_pairs + 1) / 2.0
    scale = 1.0 / shrink.xi + np.sum(
        omega[iu] ** 2 / (2.0 * shrink.lambda_sq[iu])
    )
    shrink.tau_sq = max(1.0 / gen.gamma(shape, 1.0 / scale), SCALE_FLOOR)
    shrink.xi = max(
        1.0 / gen.gamma(1.0, 1.0 / (1.0 + 1.0 / shrink.tau_sq)), SCALE_FLOOR
    )


def update_column(state: SamplerState, s: NDArray, n: int, i: int,
                  rng: RngHandle) -> SamplerState:
    """Pure single-column update; returns a new state, input untouched."""
    out = state.copy()
    _update_column_inplace(
        out.omega, out.sigma, out.shrink.lambda_sq, out.shrink.tau_sq,
        np.asarray(s, dtype=float), n, i, rng.generator,
    )
    return out


def update_shrinkage_column(state: SamplerState, i: int,
                            rng: RngHandle) -> SamplerState:
    """Pure local-shrinkage update for column ``i``."""
    out = state.copy()
    _update_shrinkage_column_inplace(
        out.omega, out.shrink.lambda_sq, out.shrink.nu, out.shrink.tau_sq,
        i, rng.generator,
    )
    return out


def update_global(state: SamplerState, rng: RngHandle) -> SamplerState:
    """Pure global-scale update (tau^2 then xi)."""
    out = state.copy()
    _update_global_inplace(out.shrink, out.omega, rng.generator)
    return out


def _loglik_stat(omega, s_mat, n):
    sign, logdet = np.linalg.slogdet(omega)
    return n / 2.0 * logdet - 0.5 * np.sum(s_mat * omega)


def run_ghs(
    s: NDArray,
    n: int,
    config: GhsConfig,
    rng: RngHandle,
    *,
    omega_init: NDArray | None = None,
    trace: bool = False,
    trace_truth: NDArray | None = None,
    check_pd_every_column: bool = False,
    drift_out: list | None = None,
) -> Chain:
    """Run the full block Gibbs sampler and assemble the chain.

    Parameters
    ----------
    s : (p, p) array
        Scatter matrix Y'Y (symmetric positive semidefinite).
    n : int
        Sample size behind ``s``.
    config : GhsConfig
        Burn-in, retained draws, thinning, optional fixed global scale.
    rng : RngHandle
        Exclusively-owned random stream.
    omega_init : optional starting precision matrix (default identity).
    trace : record a per-sweep diagnostic series (all sweeps).
    trace_truth : optional true precision matrix; when given the trace is
        Stein's loss of the current draw against it, otherwise a quantity
        proportional to the log-likelihood.
    check_pd_every_column : run a Cholesky PD check after every column
        update (slow; used by invariants tests).
    drift_out : optional list collecting the max-norm of omega @ sigma - I
        at the end of every sweep, after any refresh.
    """
    s_mat = np.asarray(s, dtype=float)
    p = s_mat.shape[0]
    if s_mat.ndim != 2 or s_mat.shape[1] != p or p < 1:
        raise DimensionError(f"scatter matrix must be square with p >= 1, got {s_mat.shape}")
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    if np.max(np.abs(s_mat - s_mat.T)) > 1e-8 * max(1.0, np.max(np.abs(s_mat))):
        raise DimensionError("scatter matrix is not symmetric")

    gen = rng.generator
    state = SamplerState.initial(p)
    if omega_init is not None:
        omega_init = np.asarray(omega_init, dtype=float)
        if not cholesky_pd_check(omega_init):
            raise NumericalError("omega_init is not symmetric positive definite")
        state.omega = symmetrize(omega_init)
        state.sigma = symmetrize(np.linalg.inv(state.omega))
    if config.fixed_tau is not None:
        state.shrink.tau_sq = config.fixed_tau**2

    total = config.burnin + config.nmc * config.thin
    dense = p <= DENSE_STORAGE_MAX_DIM
    draws = np.empty((config.nmc, p, p)) if dense else None
    mean_acc = np.zeros((p, p))
    m2_acc = np.zeros((p, p)) if not dense else None

    reservoir = reservoir_idx = None
    if not dense:
        r = min(RESERVOIR_SIZE, config.nmc)
        # dedicated stream so reservoir index choice never perturbs the chain
        pick_gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(rng.seed, spawn_key=(rng.stream_id, 7)))
        )
        reservoir_idx = np.sort(pick_gen.choice(config.nmc, size=r, replace=False))
        reservoir = np.empty((r, p * (p + 1) // 2))

    trace_vals = np.empty(total) if trace else None
    if trace and trace_truth is not None:
        from .metrics import steins_loss as _stein

    kept = 0
    identity = np.eye(p)
    eye_diag = np.diag_indices(p)
    for sweep in range(total):
        for i in range(p):
            _update_column_inplace(
                state.omega, state.sigma, state.shrink.lambda_sq,
                state.shrink.tau_sq, s_mat, n, i, gen, sweep=sweep,
            )
            _update_shrinkage_column_inplace(
                state.omega, state.shrink.lambda_sq, state.shrink.nu,
                state.shrink.tau_sq, i, gen,
            )
            if check_pd_every_column and not cholesky_pd_check(state.omega):
                raise NumericalError(
                    "omega lost positive definiteness", sweep=sweep, column=i
                )
        if config.fixed_tau is None:
            _update_global_inplace(state.shrink, state.omega, gen)
        state.sweep_index = sweep + 1

        drift = np.max(np.abs(state.omega @ state.sigma - identity))
        if drift > SIGMA_DRIFT_TOL or (sweep + 1) % SIGMA_REFRESH_EVERY == 0:
            state.sigma = symmetrize(np.linalg.inv(state.omega))
            drift = np.max(np.abs(state.omega @ state.sigma - identity))
        if drift_out is not None:
            drift_out.append(float(drift))

        if trace:
            if trace_truth is not None:
                trace_vals[sweep] = _stein(state.omega, trace_truth)
            else:
                trace_vals[sweep] = _loglik_stat(state.omega, s_mat, n)

        k = sweep - config.burnin
        if k >= 0 and (k + 1) % config.thin == 0:
            draw = symmetrize(state.omega)
            if not cholesky_pd_check(draw):
                raise NumericalError("retained draw is not PD", sweep=sweep)
            if dense:
                draws[kept] = draw
            else:
                m2_acc += draw**2
                pos = np.searchsorted(reservoir_idx, kept)
                if pos < len(reservoir_idx) and reservoir_idx[pos] == kept:
                    reservoir[pos] = _tri_flatten(draw, p)
            mean_acc += draw
            kept += 1

    mean = mean_acc / config.nmc
    sketch = None
    if not dense:
        sketch = ChainSketch(
            mean=mean,
            second_moment=m2_acc / config.nmc,
            reservoir=reservoir,
            reservoir_indices=reservoir_idx,
        )
    return Chain(
        p=p,
        config=copy.deepcopy(config),
        rng_seed=rng.seed,
        draws=draws,
        mean=mean,
        sketch=sketch,
        trace=trace_vals,
    )


def posterior_mean(chain: Chain) -> NDArray:
    """Entrywise mean of the retained draws, symmetrized and PD-verified."""
    if chain.nmc < 1:
        raise ParameterError("chain is empty")
    est = symmetrize(chain.mean)
    if not cholesky_pd_check(est):
        raise NumericalError("posterior mean is not positive definite")
    return est


def _offdiag_interval_bounds(chain: Chain, level: float) -> tuple[NDArray, NDArray]:
    lo_q = (1.0 - level) / 2.0
    hi_q = (1.0 + level) / 2.0
    vals = chain.offdiag_draws()
    lo, hi = np.quantile(vals, [lo_q, hi_q], axis=0, method="linear")
    return lo, hi


def credible_interval_select(chain: Chain, level: float) -> NDArray:
    """Boolean adjacency: entries whose central ``level`` interval excludes 0.

    Quantiles use linear interpolation between order statistics. Diagonal
    entries are always False; the output is symmetric.
    """
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must be in (0, 1), got {level}")
    p = chain.p
    lo, hi = _offdiag_interval_bounds(chain, level)
    selected = (lo > 0.0) | (hi < 0.0)
    adj = np.zeros((p, p), dtype=bool)
    iu = np.triu_indices(p, k=1)
    adj[iu] = selected
    adj |= adj.T
    return adj
