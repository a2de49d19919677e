"""Shared brute-force references for the test suite.

These are deliberately independent of the package implementations: direct
index arithmetic and dense least-squares only, so they can serve as
oracles for the fast recursive paths.
"""

import numpy as np


def phase_row(stream, channels, block, lag):
    """Stream delayed by ``lag``, sampled at each block's newest position."""
    out = np.zeros(block + 1)
    for m in range(block + 1):
        t = channels * m + channels - 1 - lag
        if t >= 0:
            out[m] = stream[t]
    return out


def residual_last(y, rows, weights=None):
    """Last entry of the LS residual of y on span(rows), optionally weighted."""
    if weights is None:
        weights = np.ones_like(y)
    if not len(rows):
        return y[-1]
    a = np.vstack(rows)
    coef, *_ = np.linalg.lstsq((a * weights).T, y * weights, rcond=None)
    return (y - coef @ a)[-1]


def brute_band_residual(z, d, channels, band, order, block, forgetting=1.0):
    """Order-``order`` LS residual of band ``band`` at ``block``, from scratch."""
    y = phase_row(d, channels, block, band)
    rows = [phase_row(z, channels, block, r) for r in range(order)]
    w = np.sqrt(forgetting ** np.arange(block, -1, -1))
    return residual_last(y, rows, w)


def brute_band_coefficients(z, d, channels, band, order, block, forgetting=1.0):
    y = phase_row(d, channels, block, band)
    rows = np.vstack([phase_row(z, channels, block, r) for r in range(order)])
    w = np.sqrt(forgetting ** np.arange(block, -1, -1))
    coef, *_ = np.linalg.lstsq((rows * w).T, y * w, rcond=None)
    return coef


def synthesize_blockwise(bank_coeffs, w):
    """Synthesis output via the explicit block-matrix double sum.

    d[M*n + M-1-i] = sum_j sum_q f_j[q*M + M-1-i] * w[n-q, j], an
    arrangement independent of the package's upsample-and-convolve path.
    """
    f = np.asarray(bank_coeffs, dtype=float)
    w = np.asarray(w, dtype=float)
    m, n_taps = f.shape
    blocks = w.shape[0]
    d = np.zeros(m * blocks)
    for n in range(blocks):
        for i in range(m):
            acc = 0.0
            for j in range(m):
                for q in range(n_taps // m):
                    if n - q >= 0:
                        acc += f[j, q * m + m - 1 - i] * w[n - q, j]
            d[m * n + m - 1 - i] = acc
    return d
