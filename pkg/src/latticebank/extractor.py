"""Order-recursive recovery of filter coefficients from lattice state.

The engine never forms filter coefficients; this module rebuilds them from
a snapshot's correlation accumulators. Forward and backward predictor
vectors are grown order by order (each step pads with a zero and subtracts
a scaled copy of the neighbouring-phase partner), and the per-band
coefficient vectors follow the same ladder the residuals used. The result
matches a direct pseudo-inverse solve of the per-band regression on the
same data to rounding error.

Quantities at phase delays past the in-block phases come from the
snapshot's per-block accumulator history: the coupling at absolute delay
``c`` reads phase ``c % M`` of the accumulators recorded ``c // M`` blocks
earlier.
"""

from dataclasses import dataclass

import numpy as np

from .bank import SerializedFilterBank, deserialize_filters  # noqa: F401  (re-export)
from .errors import IllConditionedError, InsufficientDataError


@dataclass
class OpCount:
    """Mutable multiply/add tally for cost instrumentation."""

    mult: int = 0
    add: int = 0


def _accumulators(snapshot, delay, order):
    """(delta_ab, r_alpha, r_beta) at an absolute phase delay, newest block."""
    q, phase = divmod(delay, snapshot.config.channels)
    if q >= len(snapshot.history):
        return 0.0, 0.0, 0.0
    dab, ra, rb = snapshot.history[q]
    return float(dab[phase][order]), float(ra[phase][order]), float(rb[phase][order])


def _require(value, what, delay, order, eps):
    if value <= eps:
        raise IllConditionedError(
            f"{what} at delay {delay}, order {order} is {value!r}, "
            f"at or below the floor {eps!r}; extraction is ill-conditioned"
        )
    return value


def _predictor_triangle(snapshot, levels, n_delays, ops=None):
    """Grow forward/backward predictor vectors level by level.

    Returns per-level lists: level p maps delay c to the order-p predictor
    pair. Level p keeps delays 0..(levels + n_delays - 2 - p).
    """
    eps = snapshot.config.epsilon
    width = levels + n_delays
    ctil = [[1.0] for _ in range(width)]
    dtil = [[1.0] for _ in range(width)]
    out = [(ctil, dtil)]
    for p in range(levels):
        new_c, new_d = [], []
        for c in range(width - 1 - p):
            dab_c, ra_c, _ = _accumulators(snapshot, c, p)
            _, _, rb_next = _accumulators(snapshot, c + 1, p)
            kc = dab_c / _require(rb_next, "backward energy", c + 1, p, eps)
            kd = dab_c / _require(ra_c, "forward energy", c, p, eps)
            cc, dd = ctil[c], dtil[c + 1]
            new_c.append([a - kc * b for a, b in zip(cc + [0.0], [0.0] + dd)])
            new_d.append([a - kd * b for a, b in zip([0.0] + dd, cc + [0.0])])
            if ops is not None:
                ops.mult += 2 * (p + 2) + 2
                ops.add += 2 * (p + 2)
        ctil, dtil = new_c, new_d
        out.append((ctil, dtil))
    return out


def predictors(snapshot, order, n_delays=1, ops=None):
    """Direct-form forward/backward predictors of the input stream.

    Args:
        snapshot: engine snapshot.
        order: predictor order p.
        n_delays: number of phase delays to return, starting at the block
            anchor.

    Returns:
        (forward, backward): two (n_delays, order + 1) arrays. Row c applied
        to the stream samples at delays c..c+order reproduces the engine's
        order-p forward/backward residual at that phase. Forward rows lead
        with 1, backward rows end with 1.
    """
    if order < 0 or order > snapshot.config.order:
        raise ValueError(f"order {order} out of range 0..{snapshot.config.order}")
    levels = _predictor_triangle(snapshot, order, n_delays, ops)
    ctil, dtil = levels[order]
    return np.array(ctil[:n_delays]), np.array(dtil[:n_delays])


def coefficients_by_order(snapshot, order=None, ops=None):
    """Per-band coefficient vectors for every order up to ``order``.

    Returns:
        list ``g`` with ``g[p]`` an (M, p) array: the order-p least-squares
        fit of each band's desired samples on the p most recent stream
        samples at each block anchor (growing-memory, as accumulated by the
        engine).

    Raises:
        InsufficientDataError: fewer blocks than the requested order.
        IllConditionedError: a required energy sits at/below the floor.
    """
    cfg = snapshot.config
    m = cfg.channels
    n = cfg.order if order is None else order
    if n < 0 or n > cfg.order:
        raise ValueError(f"order {n} out of range 0..{cfg.order}")
    if snapshot.blocks < n:
        raise InsufficientDataError(
            f"order-{n} extraction needs at least {n} blocks, have {snapshot.blocks}"
        )
    eps = cfg.epsilon
    levels = _predictor_triangle(snapshot, max(n - 1, 0), 1, ops)
    deb = snapshot.delta_eb
    out = [np.zeros((m, 0))]
    g = [[] for _ in range(m)]
    for p in range(n):
        _, _, rb0 = _accumulators(snapshot, 0, p)
        inv_rb0 = 1.0 / _require(rb0, "backward energy", 0, p, eps)
        d0 = levels[p][1][0]
        for i in range(m):
            kappa = deb[i][p] * inv_rb0
            g[i] = [a + kappa * b for a, b in zip(g[i] + [0.0], d0)]
            if ops is not None:
                ops.mult += p + 2
                ops.add += p + 1
        out.append(np.array(g))
    return out


def extract_filters(snapshot, order=None, ops=None):
    """Recover the serialized filter set identified by the engine.

    Args:
        snapshot: engine snapshot taken after at least ``order`` blocks.
        order: filter length; defaults to the engine order. Must be a
            multiple of the channel count.

    Returns:
        SerializedFilterBank whose row i holds band i's coefficients.
    """
    n = snapshot.config.order if order is None else order
    if n % snapshot.config.channels:
        raise ValueError(
            f"order {n} is not a multiple of {snapshot.config.channels} channels"
        )
    return SerializedFilterBank(coefficients_by_order(snapshot, n, ops)[n])
