"""Brute-force least-squares reference implementations.

Everything here is deliberately simple and cubic in the order: these
routines are the ground truth that the fast recursive engine and the
coefficient extractor are tested against. Two independent solution paths
are provided (regularized normal equations and an SVD-based solve) so the
oracle itself can be cross-checked.
"""

import numpy as np

from ._validation import as_signal
from .errors import IllConditionedError

#: default ridge scale: eps = RIDGE_SCALE * trace(Z Z^T) / order
RIDGE_SCALE = 1e-10


def build_data_matrix(z, order, anchor):
    """Delay-embedded data matrix ending at a time anchor.

    Row r holds the stream delayed by r samples; column c holds time
    ``anchor - (L-1-c)`` where ``L = anchor + 1``. Samples before index 0
    are zero (pre-windowing).

    Args:
        z: 1-D stream.
        order: number of delayed rows (>= 1).
        anchor: index of the newest sample (last column of row 0).

    Returns:
        (order, anchor + 1) array.
    """
    z = as_signal(z)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if not 0 <= anchor < len(z):
        raise ValueError(f"anchor {anchor} outside stream of length {len(z)}")
    length = anchor + 1
    mat = np.zeros((order, length))
    for r in range(order):
        mat[r, r:] = z[: length - r]
    return mat


def block_data_matrix(z, channels, order, block):
    """Data matrix for the per-band regression, sampled at block anchors.

    Row r, column m holds ``z[M*m + M-1 - r]`` (zero when negative): the
    stream delayed by r samples, read once per block at the newest sample
    of each block, up to and including ``block``.
    """
    z = as_signal(z)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    m = channels
    anchors = np.arange(block + 1) * m + m - 1
    if anchors[-1] >= len(z):
        raise ValueError(f"block {block} outside stream of length {len(z)}")
    mat = np.zeros((order, block + 1))
    for r in range(order):
        idx = anchors - r
        valid = idx >= 0
        mat[r, valid] = z[idx[valid]]
    return mat


def band_desired_row(d, channels, band, block):
    """Phase-``band`` samples of a desired stream on the block grid."""
    d = as_signal(d)
    m = channels
    idx = np.arange(block + 1) * m + m - 1 - band
    if idx[-1] >= len(d):
        raise ValueError(f"block {block} outside stream of length {len(d)}")
    out = np.zeros(block + 1)
    valid = idx >= 0
    out[valid] = d[idx[valid]]
    return out


def _check_aligned(d_row, mat):
    d_row = np.asarray(d_row, dtype=np.float64)
    if d_row.ndim != 1 or d_row.shape[0] != mat.shape[1]:
        raise ValueError(
            f"desired row has shape {d_row.shape}, data matrix has {mat.shape[1]} columns"
        )
    return d_row


def _ridge(mat, eps):
    gram = mat @ mat.T
    if eps is None:
        eps = RIDGE_SCALE * np.trace(gram) / mat.shape[0]
    return gram + eps * np.eye(mat.shape[0])


def project_residual(d_row, mat, eps=None):
    """Last entry of the LS residual of ``d_row`` regressed on the rows of ``mat``.

    Computes ``d (I - Z^T (Z Z^T + eps I)^-1 Z) pi^T`` via regularized
    normal equations. ``eps`` defaults to ``RIDGE_SCALE * trace(ZZ^T)/p``.

    Raises:
        IllConditionedError: if the regularized Gram system still fails.
    """
    d_row = _check_aligned(d_row, mat)
    try:
        coef = np.linalg.solve(_ridge(mat, eps), mat @ d_row)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"Gram system singular beyond ridge rescue: {exc}") from exc
    resid = d_row[-1] - coef @ mat[:, -1]
    if not np.isfinite(resid):
        raise IllConditionedError("non-finite projection residual")
    return float(resid)


def project_residual_qr(d_row, mat):
    """Independent cross-check of :func:`project_residual` via SVD least squares."""
    d_row = _check_aligned(d_row, mat)
    coef, *_ = np.linalg.lstsq(mat.T, d_row, rcond=None)
    return float(d_row[-1] - coef @ mat[:, -1])


def solve_coefficients(d_row, mat, eps=None):
    """Minimizer g of ``||d - g Z||^2`` (prediction is ``+g Z``, residual ``d - g Z``).

    With ``eps=None`` uses an SVD least-squares solve (minimum-norm on rank
    deficiency); passing ``eps`` switches to ridge normal equations.
    """
    d_row = _check_aligned(d_row, mat)
    if eps is None:
        coef, *_ = np.linalg.lstsq(mat.T, d_row, rcond=None)
        return coef
    try:
        return np.linalg.solve(_ridge(mat, eps), mat @ d_row)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"Gram system singular beyond ridge rescue: {exc}") from exc
