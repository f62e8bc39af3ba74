"""Shared fixtures and frozen inputs for the conditional-law oracles."""

import numpy as np
import pytest

from ghs.linalg import inverse_block_from_sigma, symmetrize


def random_pd(gen, p, jitter=1.0):
    """A random symmetric positive definite p x p matrix."""
    a = gen.standard_normal((p, p)) / np.sqrt(p)
    return symmetrize(a @ a.T) + jitter * np.eye(p)


def conditional_fixture(p, n, seed, scale):
    """Frozen sampler inputs for moment checks of the column conditional.

    Builds a PD precision matrix, its inverse, a scatter matrix from
    correlated data (scaled so the conditional mean coordinates are large
    relative to their standard deviations), and a symmetric array of local
    scales. Everything is a deterministic function of (p, n, seed, scale).
    """
    g = np.random.Generator(np.random.PCG64(seed))
    omega = random_pd(g, p)
    sigma = symmetrize(np.linalg.inv(omega))
    L = np.linalg.cholesky(sigma)
    y = g.standard_normal((n, p)) @ L.T * scale
    s = symmetrize(y.T @ y)
    lam = symmetrize(g.uniform(0.5, 2.0, (p, p)))
    np.fill_diagonal(lam, 1.0)
    return omega, sigma, s, lam


def column_conditional_closed_form(omega, sigma, s, lam, tau_sq, i):
    """Exact (inv_block, C, mean) of the beta conditional at column i."""
    p = omega.shape[0]
    keep = np.r_[0:i, i + 1 : p]
    inv_block = inverse_block_from_sigma(sigma, i)
    prec = s[i, i] * inv_block + np.diag(1.0 / (lam[keep, i] * tau_sq))
    c = np.linalg.inv(symmetrize(prec))
    mean = -c @ s[keep, i]
    return inv_block, c, mean


@pytest.fixture
def gen():
    return np.random.Generator(np.random.PCG64(20240817))
