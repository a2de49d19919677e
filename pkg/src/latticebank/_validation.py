"""Small input validation helpers shared across the package."""

import numpy as np


def as_signal(x, name="signal"):
    """Coerce to a finite 1-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_channels(w, channels=None, name="channels"):
    """Coerce to a finite 2-D (blocks, channels) float64 array."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (blocks, channels), got shape {arr.shape}")
    if channels is not None and arr.shape[1] != channels:
        raise ValueError(f"{name} has {arr.shape[1]} channels, expected {channels}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_divisible(n, m, what="length"):
    if n % m != 0:
        raise ValueError(f"{what} {n} is not divisible by channel count {m}")
