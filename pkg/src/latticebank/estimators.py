"""Scikit-learn style wrappers around the functional core.

These let the whitener and the synthesis-bank identifier compose with
sklearn pipelines and model-selection tooling: hyperparameters live in
``__init__`` (so ``get_params``/``set_params``/``clone`` work), state
learned from data lands in trailing-underscore attributes.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_channels, as_signal
from .bank import deserialize_filters, interleave, synthesize_serialized
from .extractor import extract_filters
from .lattice import EngineConfig, LatticeEngine
from .whitening import WhitenerConfig, phase_predictors, whiten


def _as_1d(X, name):
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    return as_signal(arr, name)


class SubbandWhitener(TransformerMixin, BaseEstimator):
    """Split a signal into M per-phase channels of LS prediction errors.

    fit() learns the per-phase forward predictors on the given signal;
    transform() applies them (prediction error + unit-variance scaling)
    to a signal of the same kind.
    """

    def __init__(self, channels=2, order=8, epsilon=1e-12, forgetting=1.0):
        self.channels = channels
        self.order = order
        self.epsilon = epsilon
        self.forgetting = forgetting

    def _config(self):
        return WhitenerConfig(
            channels=self.channels,
            order=self.order,
            epsilon=self.epsilon,
            forgetting=self.forgetting,
        )

    def fit(self, X, y=None):
        x = _as_1d(X, "X")
        self.predictors_ = phase_predictors(x, self._config())
        return self

    def transform(self, X):
        if not hasattr(self, "predictors_"):
            raise NotFittedError("SubbandWhitener is not fitted")
        x = _as_1d(X, "X")
        m, p = self.channels, self.order
        blocks = len(x) // m
        xpad = np.concatenate([np.zeros(p), x])
        out = np.empty((blocks, m))
        for i in range(m):
            targets = np.arange(blocks) * m + m - 1 - i
            a = np.column_stack([xpad[targets + p - 1 - r] for r in range(p)])
            resid = x[targets] - a @ self.predictors_[i]
            scale = resid.std()
            out[:, i] = resid / scale if scale > self.epsilon else resid
        return out

    def fit_transform(self, X, y=None):
        # fit + transform on the same signal == one-shot whitening
        self.fit(X)
        return whiten(_as_1d(X, "X"), self._config())


class SynthesisBankEstimator(RegressorMixin, BaseEstimator):
    """Identify the synthesis bank mapping M channel inputs to a desired stream.

    fit(X, y) runs the recursive LS engine over the interleaved channels
    X (blocks, M) against the serialized desired stream y (length M*blocks)
    and extracts the coefficients. predict(X) synthesizes the estimate for
    new channel inputs with the learned bank.

    Attributes:
        serialized_filters_: (M, N) per-phase coefficients.
        filters_: (M, N) per-channel bank equivalent.
        residual_trace_: per-block squared residual at the final order.
    """

    def __init__(self, channels=2, order=4, epsilon=1e-12, forgetting=1.0):
        self.channels = channels
        self.order = order
        self.epsilon = epsilon
        self.forgetting = forgetting

    def fit(self, X, y):
        w = as_channels(X, channels=self.channels, name="X")
        d = as_signal(np.asarray(y, dtype=np.float64), "y")
        if len(d) != w.shape[0] * self.channels:
            raise ValueError(
                f"y has length {len(d)}, expected blocks*channels = "
                f"{w.shape[0] * self.channels}"
            )
        z = interleave(w)
        engine = LatticeEngine(
            EngineConfig(
                channels=self.channels,
                order=self.order,
                epsilon=self.epsilon,
                forgetting=self.forgetting,
            )
        )
        residuals = engine.process(z, d)
        bank = extract_filters(engine.snapshot())
        self.serialized_filters_ = bank.coefficients
        self.filters_ = deserialize_filters(bank).coefficients
        self.residual_trace_ = np.sum(residuals[:, :, self.order] ** 2, axis=1)
        self._bank = bank
        return self

    def predict(self, X):
        if not hasattr(self, "serialized_filters_"):
            raise NotFittedError("SynthesisBankEstimator is not fitted")
        w = as_channels(X, channels=self.channels, name="X")
        return synthesize_serialized(self._bank, interleave(w))
