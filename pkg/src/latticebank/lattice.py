"""Time- and order-recursive least-squares engine for interleaved streams.

The engine consumes an interleaved input stream ``z`` and a desired stream
``d`` one block (M samples) at a time and maintains, for every order p up
to N, the exact growing-memory least-squares residuals of all M output
bands. Band i's order-p problem regresses the phase-i samples of ``d``,
taken once per block, on the p most recent ``z`` samples ending at each
block's newest sample. The recursions form a circular lattice: forward and
backward prediction errors of ``z`` are kept per phase, the per-order
couplings step through the phases cyclically (wrapping to the previous
block), and M joint-process ladders produce the band residuals.

All state lives in plain Python lists of floats; per-block cost is linear
in M*N and instrumented multiply/add counters are kept for cost tests.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_signal
from .errors import IllConditionedError

#: audited per-iteration arithmetic counts (multiplies include divisions)
_TIME_MULTS, _TIME_ADDS = 11, 3
_ORDER_MULTS, _ORDER_ADDS = 7, 3
_LADDER_MULTS, _LADDER_ADDS = 8, 3


@dataclass(frozen=True)
class EngineConfig:
    """Engine parameters.

    Attributes:
        channels: number of interleaved phases M (>= 1).
        order: maximum lattice order N, a multiple of M.
        epsilon: floor applied to every energy/likelihood divisor. May be
            zero for diagnostics, in which case a zero divisor with a
            nonzero numerator raises IllConditionedError.
        forgetting: exponential forgetting factor in (0, 1]; 1 keeps the
            full growing-memory accumulation.
    """

    channels: int
    order: int
    epsilon: float = 1e-12
    forgetting: float = 1.0

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")
        if self.order < 1 or self.order % self.channels != 0:
            raise ValueError(
                f"order must be a positive multiple of channels, got {self.order}"
            )
        if not 0.0 < self.forgetting <= 1.0:
            raise ValueError(f"forgetting must be in (0, 1], got {self.forgetting}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class LatticeSnapshot:
    """Frozen copy of all engine state at one block.

    Arrays are read-only; ``history`` holds per-block copies of the
    correlation accumulators (newest first) deep enough for order-N
    coefficient extraction.
    """

    config: EngineConfig
    blocks: int
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    residual_energy: np.ndarray = field(repr=False)
    delta_eb: np.ndarray = field(repr=False)
    history: tuple = field(repr=False)


def _frozen(rows):
    arr = np.array(rows, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class LatticeEngine:
    """Single-writer recursive LS lattice over an interleaved stream.

    One instance must be stepped from a single thread; independent
    instances are unrelated. Snapshots are immutable.
    """

    def __init__(self, config):
        if not isinstance(config, EngineConfig):
            config = EngineConfig(**config) if isinstance(config, dict) else config
        self.config = config
        m, n = config.channels, config.order
        self._m, self._n = m, n
        self._eps = config.epsilon
        self._lam = config.forgetting
        self.blocks = 0
        self.mult_count = 0
        self.add_count = 0
        # per phase c (delay behind the block anchor) and order p
        self.alpha = [[0.0] * (n + 1) for _ in range(m)]
        self.beta = [[0.0] * (n + 1) for _ in range(m)]
        self.delta = [[1.0] * (n + 1) for _ in range(m)]
        self.delta_ab = [[0.0] * n for _ in range(m)]
        self.r_alpha = [[0.0] * n for _ in range(m)]
        self.r_beta = [[0.0] * n for _ in range(m)]
        # joint-process ladder, per band i
        self.delta_eb = [[0.0] * n for _ in range(m)]
        self.e = [[0.0] * (n + 1) for _ in range(m)]
        self.r_e = [[0.0] * (n + 1) for _ in range(m)]
        # accumulator history (newest first) for coefficient extraction;
        # depth covers absolute delays up to N + M - 1
        self._history = deque(maxlen=(n + m - 1) // m + 1)

    def _div(self, num, den):
        # every divisor passes through the epsilon floor
        d = den if den > self._eps else self._eps
        if d <= 0.0:
            if num == 0.0:
                return 0.0
            raise IllConditionedError(
                f"zero divisor with nonzero numerator at block {self.blocks} "
                "(epsilon floor disabled)"
            )
        return num / d

    def step(self, z_block, d_block):
        """Process one block and return all band residuals.

        Args:
            z_block: M new stream samples, phase-indexed: ``z_block[i]`` is
                the sample at phase i, so index 0 is the block's newest
                sample and index M-1 its oldest.
            d_block: M desired samples in the same phase order.

        Returns:
            (M, N+1) array; entry [i, p] is the order-p residual of band i
            at this block.
        """
        m, n, lam = self._m, self._n, self._lam
        zb = [float(v) for v in z_block]
        db = [float(v) for v in d_block]
        if len(zb) != m or len(db) != m:
            raise ValueError(f"blocks must have length {m}")

        alpha, beta, delta = self.alpha, self.beta, self.delta
        dab, ra, rb = self.delta_ab, self.r_alpha, self.r_beta
        deb, e, re = self.delta_eb, self.e, self.r_e

        # phase-0 values of the previous block, consumed when the phase
        # coupling wraps past the oldest in-block phase
        beta_w = list(beta[0])
        delta_w = list(delta[0])
        rb_w = list(rb[0])

        for c in range(m):
            alpha[c][0] = zb[c]
            beta[c][0] = zb[c]
            delta[c][0] = 1.0
            e[c][0] = db[c]

        mults = adds = 0
        for p in range(n):
            bw, dw, rw = beta_w[p], delta_w[p], rb_w[p]
            # correlation/energy time updates; all phases first, so the
            # order updates below see this block's energies everywhere
            for c in range(m):
                if c + 1 < m:
                    b_next, d_next = beta[c + 1][p], delta[c + 1][p]
                else:
                    b_next, d_next = bw, dw
                a_c, b_c = alpha[c][p], beta[c][p]
                inv_next = self._div(1.0, d_next)
                inv_here = self._div(1.0, delta[c][p])
                dab[c][p] = lam * dab[c][p] + a_c * inv_next * b_next
                ra[c][p] = lam * ra[c][p] + a_c * inv_next * a_c
                rb[c][p] = lam * rb[c][p] + b_c * inv_here * b_c
                mults += _TIME_MULTS
                adds += _TIME_ADDS
            # order updates p -> p+1
            for c in range(m):
                if c + 1 < m:
                    b_next, rb_next = beta[c + 1][p], rb[c + 1][p]
                else:
                    b_next, rb_next = bw, rw
                a_c, b_c = alpha[c][p], beta[c][p]
                inv_rb = self._div(1.0, rb[c][p])
                delta[c][p + 1] = delta[c][p] - b_c * inv_rb * b_c
                alpha[c][p + 1] = a_c - self._div(dab[c][p], rb_next) * b_next
                beta[c][p + 1] = b_next - self._div(dab[c][p], ra[c][p]) * a_c
                mults += _ORDER_MULTS
                adds += _ORDER_ADDS
            # ladder: every band couples to the phase of the block anchor
            b0, inv_d0 = beta[0][p], self._div(1.0, delta[0][p])
            inv_rb0 = self._div(1.0, rb[0][p])
            for i in range(m):
                e_i = e[i][p]
                deb[i][p] = lam * deb[i][p] + e_i * inv_d0 * b0
                re[i][p] = lam * re[i][p] + e_i * inv_d0 * e_i
                e[i][p + 1] = e_i - deb[i][p] * inv_rb0 * b0
                mults += _LADDER_MULTS
                adds += _LADDER_ADDS
        for i in range(m):
            inv_dn = self._div(1.0, delta[0][n])
            re[i][n] = lam * re[i][n] + e[i][n] * inv_dn * e[i][n]

        self.mult_count += mults
        self.add_count += adds
        self.blocks += 1
        self._history.appendleft(
            ([list(r) for r in dab], [list(r) for r in ra], [list(r) for r in rb])
        )
        return np.array(e)

    def process(self, z, d):
        """Step through whole streams; returns the (blocks, M, N+1) residual tensor."""
        z = as_signal(z)
        d = as_signal(d)
        m = self._m
        if len(z) != len(d):
            raise ValueError("streams must have equal length")
        if len(z) % m:
            raise ValueError(f"stream length {len(z)} not divisible by {m}")
        blocks = len(z) // m
        out = np.empty((blocks, m, self._n + 1))
        for k in range(blocks):
            blk = slice(m * k, m * k + m)
            out[k] = self.step(z[blk][::-1], d[blk][::-1])
        return out

    def residuals(self, order):
        """Latest band residuals at one order; order 0 is the raw desired block."""
        if self.blocks == 0:
            raise RuntimeError("no blocks processed yet")
        if not 0 <= order <= self._n:
            raise IndexError(f"order {order} out of range 0..{self._n}")
        return np.array([self.e[i][order] for i in range(self._m)])

    def residual_energy(self, order):
        """Running LS cost (weighted sum of squared residuals) per band."""
        if not 0 <= order <= self._n:
            raise IndexError(f"order {order} out of range 0..{self._n}")
        return np.array([self.r_e[i][order] for i in range(self._m)])

    def snapshot(self):
        """Immutable copy of the full state, usable for coefficient extraction."""
        history = tuple(
            (_frozen(dab), _frozen(ra), _frozen(rb)) for dab, ra, rb in self._history
        )
        return LatticeSnapshot(
            config=self.config,
            blocks=self.blocks,
            alpha=_frozen(self.alpha),
            beta=_frozen(self.beta),
            delta=_frozen(self.delta),
            residuals=_frozen(self.e),
            residual_energy=_frozen(self.r_e),
            delta_eb=_frozen(self.delta_eb),
            history=history,
        )

    def dump_state(self):
        """Text dump ``var[i][p]=value``, one line each, sorted lexicographically."""
        named = {
            "alpha": self.alpha,
            "beta": self.beta,
            "delta": self.delta,
            "delta_ab": self.delta_ab,
            "delta_eb": self.delta_eb,
            "e": self.e,
            "r_alpha": self.r_alpha,
            "r_beta": self.r_beta,
            "r_e": self.r_e,
        }
        lines = [
            f"{name}[{i}][{p}]={value!r}"
            for name, rows in named.items()
            for i, row in enumerate(rows)
            for p, value in enumerate(row)
        ]
        return "\n".join(sorted(lines)) + "\n"
