"""Subband whitening front-end.

Splits a raw scalar signal into M block-rate channels, one per phase, and
replaces each sample by its least-squares forward prediction error given
the immediately preceding stream samples. The per-phase predictors are
fitted on the pre-windowed data (growing memory, optionally exponentially
weighted) and applied over the whole record, so each output channel is
exactly orthogonal to its regressors. Channels are normalized to unit
sample variance so downstream gains stay comparable across excitations.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_signal


@dataclass(frozen=True)
class WhitenerConfig:
    """Whitening parameters.

    Attributes:
        channels: number of output channels M.
        order: predictor order P per phase (serialized taps).
        epsilon: variance floor below which a channel is left unscaled.
        forgetting: exponential weight in (0, 1] for the predictor fit.
    """

    channels: int
    order: int
    epsilon: float = 1e-12
    forgetting: float = 1.0

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if not 0.0 < self.forgetting <= 1.0:
            raise ValueError(f"forgetting must be in (0, 1], got {self.forgetting}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


def phase_predictors(x, config):
    """Fit the per-phase forward predictors.

    Returns:
        (M, P) array; row i predicts the phase-i sample of each block from
        the P preceding stream samples.
    """
    x = as_signal(x)
    m, p = config.channels, config.order
    if len(x) < m:
        raise ValueError(f"signal of length {len(x)} is shorter than one block of {m}")
    blocks = len(x) // m
    xpad = np.concatenate([np.zeros(p), x])
    coeffs = np.empty((m, p))
    weights = np.sqrt(config.forgetting ** np.arange(blocks - 1, -1, -1))
    for i in range(m):
        targets = np.arange(blocks) * m + m - 1 - i
        # regressor column r holds the sample r+1 steps before the target
        a = np.column_stack([xpad[targets + p - 1 - r] for r in range(p)])
        coeffs[i], *_ = np.linalg.lstsq(a * weights[:, None], x[targets] * weights, rcond=None)
    return coeffs


def whiten(x, config):
    """Whiten a signal into M approximately-decorrelated channels.

    Args:
        x: raw signal, pre-windowed.
        config: WhitenerConfig.

    Returns:
        (blocks, M) array; column i is the normalized order-P prediction
        error of phase i. All-zero input yields all-zero output.
    """
    x = as_signal(x)
    coeffs = phase_predictors(x, config)
    m, p = config.channels, config.order
    blocks = len(x) // m
    xpad = np.concatenate([np.zeros(p), x])
    out = np.empty((blocks, m))
    for i in range(m):
        targets = np.arange(blocks) * m + m - 1 - i
        a = np.column_stack([xpad[targets + p - 1 - r] for r in range(p)])
        resid = x[targets] - a @ coeffs[i]
        scale = resid.std()
        out[:, i] = resid / scale if scale > config.epsilon else resid
    return out
