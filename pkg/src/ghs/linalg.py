"""Dense symmetric-matrix utilities.

Positive-definiteness checks via Cholesky, column/row partitioning used by
the per-column Gibbs updates, and the block formula that recovers the
inverse of a principal submatrix of a precision matrix from its tracked
inverse (the covariance matrix) without a fresh matrix inversion.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, NumericalError

#: Maximum absolute asymmetry tolerated before a matrix is declared
#: non-symmetric by :func:`cholesky_pd_check`.
SYMMETRY_TOL = 1e-10


def symmetrize(m: NDArray) -> NDArray:
    """Return (M + M') / 2, forcing exact storage symmetry."""
    return (m + m.T) / 2.0


def cholesky_pd_check(m: NDArray, sym_tol: float = SYMMETRY_TOL) -> bool:
    """Check symmetric positive definiteness.

    Returns True iff ``m`` is symmetric within ``sym_tol`` (max absolute
    asymmetry) and its Cholesky factorization succeeds with all pivots
    strictly positive.

    Raises
    ------
    DimensionError
        If ``m`` is not square.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return True
    if np.max(np.abs(m - m.T)) > sym_tol:
        return False
    try:
        L = np.linalg.cholesky(symmetrize(m))
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.diag(L) > 0.0))


@dataclass
class ColumnPartition:
    """Blocks of a square matrix partitioned at row/column ``index``.

    ``off_block`` keeps the remaining p-1 coordinates in their original
    order; ``off_column`` is the column at ``index`` with the corner entry
    removed, and ``corner`` is the (index, index) entry.
    """

    index: int
    off_block: NDArray
    off_column: NDArray
    corner: float


def _check_index(p: int, i: int) -> None:
    if not 0 <= i < p:
        raise DimensionError(f"index {i} out of range for dimension {p}")


def partition(m: NDArray, i: int) -> ColumnPartition:
    """Split ``m`` into the blocks around row/column ``i``."""
    m = np.asarray(m)
    p = m.shape[0]
    if m.ndim != 2 or m.shape[1] != p:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    _check_index(p, i)
    keep = np.r_[0:i, i + 1 : p]
    return ColumnPartition(
        index=i,
        off_block=m[np.ix_(keep, keep)],
        off_column=m[keep, i],
        corner=m[i, i],
    )


def reassemble(part: ColumnPartition) -> NDArray:
    """Rebuild the source matrix from a :class:`ColumnPartition` exactly."""
    k = part.off_block.shape[0]
    p = k + 1
    i = part.index
    out = np.empty((p, p), dtype=part.off_block.dtype)
    keep = np.r_[0:i, i + 1 : p]
    out[np.ix_(keep, keep)] = part.off_block
    out[keep, i] = part.off_column
    out[i, keep] = part.off_column
    out[i, i] = part.corner
    return out


def inverse_block_from_sigma(sigma: NDArray, i: int) -> NDArray:
    """Inverse of the precision submatrix with row/column ``i`` deleted.

    Given the covariance matrix ``sigma`` (the inverse of the precision
    matrix), the inverse of the precision matrix's principal submatrix is
    recovered by the rank-one block identity

        sigma_block - outer(sigma_col, sigma_col) / sigma_ii,

    avoiding any explicit matrix inversion.

    Raises
    ------
    NumericalError
        If the corner entry ``sigma[i, i]`` is not strictly positive.
    """
    part = partition(sigma, i)
    if part.corner <= 0.0:
        raise NumericalError(
            f"non-positive diagonal {part.corner!r} at index {i} in covariance"
        )
    return part.off_block - np.outer(part.off_column, part.off_column) / part.corner
