"""Multirate synthesis filter-bank model and its structural transforms.

An M-channel synthesis bank holds M FIR filters of common length N (N a
multiple of M). Feeding it M block-rate channel sequences produces one
full-rate output stream. The same system has an equivalent single-stream
form: interleave the channel inputs into one scalar sequence and drive a
set of M re-indexed filters, one per output phase. Both views are
implemented here and are exactly equivalent sample for sample.

Stream conventions used throughout the package:

- All sequences are pre-windowed: samples before index 0 are zero.
- Block ``n`` of an interleaved stream ``z`` occupies ``z[M*n .. M*n+M-1]``.
- Phase ``i`` (``0 <= i < M``) of block ``n`` sits at index ``M*n + M-1-i``,
  so phase 0 is the newest sample of each block. Channel ``i`` maps to
  phase ``i``: ``z[M*n + M-1-i] == w[n, i]``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_channels, as_signal, check_divisible


def _validated_coefficients(coefficients):
    arr = np.array(coefficients, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"coefficients must be 2-D (channels, taps), got {arr.shape}")
    m, n = arr.shape
    if m < 1:
        raise ValueError("need at least one channel")
    check_divisible(n, m, "filter length")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients contain non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FilterBank:
    """Per-channel view of a synthesis bank: row i holds filter i's taps."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _validated_coefficients(self.coefficients))

    @property
    def channels(self):
        return self.coefficients.shape[0]

    @property
    def length(self):
        return self.coefficients.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, type(self))
            and self.coefficients.shape == other.coefficients.shape
            and bool(np.array_equal(self.coefficients, other.coefficients))
        )


@dataclass(frozen=True)
class SerializedFilterBank:
    """Per-output-phase view: row i filters the interleaved stream for phase i."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _validated_coefficients(self.coefficients))

    @property
    def channels(self):
        return self.coefficients.shape[0]

    @property
    def length(self):
        return self.coefficients.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, type(self))
            and self.coefficients.shape == other.coefficients.shape
            and bool(np.array_equal(self.coefficients, other.coefficients))
        )


def interleave(w):
    """Time-multiplex M channel sequences into one scalar stream.

    Args:
        w: (blocks, channels) array, column i = channel i.

    Returns:
        1-D array of length blocks*channels with ``z[M*n + M-1-i] = w[n, i]``.
    """
    w = as_channels(w)
    return w[:, ::-1].reshape(-1).copy()


def deinterleave(z, channels):
    """Inverse of :func:`interleave`.

    Raises:
        ValueError: if ``len(z)`` is not divisible by ``channels``.
    """
    z = as_signal(z)
    check_divisible(len(z), channels, "stream length")
    return z.reshape(-1, channels)[:, ::-1].copy()


def polyphase_components(bank, channel):
    """Type-II polyphase components of one filter.

    Component k of filter i holds the taps feeding output phase k:
    ``comp[k, p] = f_i[p*M + M-1-k]``.

    Returns:
        (channels, length // channels) array, row k = component k.
    """
    m, n = bank.channels, bank.length
    if not 0 <= channel < m:
        raise IndexError(f"channel {channel} out of range for {m}-channel bank")
    taps = bank.coefficients[channel]
    # reshape to (length//M, M) tap groups, then reverse within each group
    return taps.reshape(n // m, m)[:, ::-1].T.copy()


def synthesize(bank, w):
    """Run the synthesis bank: upsample each channel by M, filter, and sum.

    Args:
        bank: FilterBank.
        w: (blocks, channels) channel inputs, pre-windowed.

    Returns:
        Output stream of length blocks*channels.
    """
    w = as_channels(w, channels=bank.channels)
    m = bank.channels
    k = w.shape[0]
    out = np.zeros(m * k)
    up = np.zeros(m * k)
    for j in range(m):
        up[:] = 0.0
        up[::m] = w[:, j]
        out += np.convolve(up, bank.coefficients[j])[: m * k]
    return out


def serialize_filters(bank):
    """Re-index a per-channel bank into its per-output-phase form.

    The result is the unique coefficient set for which
    :func:`synthesize_serialized` on the interleaved inputs reproduces
    :func:`synthesize` exactly: ``g[i, l] = f[l % M, (l//M)*M + M-1-i]``.
    """
    m, n = bank.channels, bank.length
    f = bank.coefficients
    lags = np.arange(n)
    g = np.empty((m, n))
    for i in range(m):
        g[i] = f[lags % m, (lags // m) * m + m - 1 - i]
    return SerializedFilterBank(g)


def deserialize_filters(serialized):
    """Exact inverse of :func:`serialize_filters`."""
    m, n = serialized.channels, serialized.length
    g = serialized.coefficients
    f = np.empty((m, n))
    taps = np.arange(n)
    q, s = taps // m, taps % m
    for j in range(m):
        f[j] = g[m - 1 - s, q * m + j]
    return FilterBank(f)


def synthesize_serialized(serialized, z):
    """Filter one interleaved stream with the per-phase coefficient set.

    Output phase i of block n is the dot product of row i with the most
    recent N stream samples ending at the block's newest sample:
    ``d[M*n + M-1-i] = sum_j g[i, j] * z[M*n + M-1 - j]`` (pre-windowed).
    """
    z = as_signal(z)
    m, n = serialized.channels, serialized.length
    check_divisible(len(z), m, "stream length")
    blocks = len(z) // m
    g = serialized.coefficients
    zpad = np.concatenate([np.zeros(n - 1), z])
    windows = np.lib.stride_tricks.sliding_window_view(zpad, n)
    anchors = np.arange(blocks) * m + m - 1
    d = np.empty(m * blocks)
    # windows[t] = z[t-N+1 .. t]; reversed row gives taps ordered by lag
    for i in range(m):
        d[anchors - i] = windows[anchors] @ g[i, ::-1]
    return d


def residual_direct(serialized, z, d):
    """Residual of the serialized bank's output against a desired stream."""
    z = as_signal(z)
    d = as_signal(d)
    if len(d) != len(z):
        raise ValueError(f"desired length {len(d)} != stream length {len(z)}")
    return d - synthesize_serialized(serialized, z)
