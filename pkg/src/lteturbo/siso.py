"""Soft-input soft-output decoding of one constituent code.

The decoder is the usual forward/backward recursion over the 8-state
trellis with a selectable max* kernel.  The implementation follows a few
cost-saving conventions throughout:

* Branch metrics.  Each trellis stage has 16 edge metrics but only four
  distinct values g1, g2, -g2, -g1 (see trellis module); only g1 and g2
  are ever computed.

* Normalization.  After every stage the state-0 metric is subtracted
  from all eight.  Because every max* variant is shift-equivariant this
  changes no LLR, it only keeps metrics bounded -- and state 0 becomes
  implicitly zero, so only seven values per stage are stored.

* Storage.  Only the forward metrics are kept (a MetricMatrix of 7*n
  values per block).  Backward metrics live in an 8-slot working
  register: the backward recursion and the LLR output are fused into one
  loop, so each backward column is consumed the moment it is produced.

* Boundaries.  The forward recursion starts from the known state 0.  The
  backward recursion starts from state 0 at the end of the tail section
  and consumes the three tail-stage LLRs to reach the end of the
  information section.  In sliding-window mode, interior windows instead
  acquire their backward boundary by recursing over `acquisition_len`
  stages from an all-zero (uniform) start.

Inputs use bipolar labels: bit 0 -> +1.  An LLR is ln(P(b=0)/P(b=1)), so
positive LLRs vote for bit 0.  The recursions run on half-scale branch
metrics, gamma(e) = (u*lu + c1*lc1 + c2*lc2) / 2: a path's metric is then
its true log-likelihood exponent (P(b|L) ~ exp(x*L/2) per bit), so the
output reduction yields genuine a-posteriori LLRs and the extrinsic
split llr_out - lu removes the bit's own systematic-plus-a-priori
contribution exactly.  Without the 1/2 the output would carry 2*lu and
the iterative exchange would re-feed systematic information to itself.

Every array argument accepts leading batch axes: lu of shape (b, n)
decodes b independent blocks in one call (op counters then report b
times the per-block counts).
"""

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .maxstar import (METRIC_NEG_INF, SENTINEL_CEILING, DEFAULT_CORRECTION,
                      CorrectionParams, MaxStarMode, max_star, max_star_reduce)
from .trellis import lte_trellis

_TRELLIS = lte_trellis()

# Per-invocation costs of the butterfly kernel: 8 states x 2 incoming
# edges, one add per candidate and one max* per state.
BUTTERFLY_ADDS = 16
BUTTERFLY_MAX_STAR_PAIRS = 8


@dataclass
class OpCounts:
    """Operation tally for one decode call.

    Counted per logical block; a batched call over b blocks reports b
    times the per-block numbers.  Conventions:

    * max_star_pairs counts butterfly (state metric) max* evaluations
      only: 8 forward + 8 backward per in-block stage.  The three
      boundary-initialisation steps that consume the tail LLRs are not
      in-block work and are excluded; sliding-window acquisition stages
      are in-block work and are included.
    * llr_reduces counts 8-way output reductions, two per stage (one per
      bit hypothesis); the pairwise max* steps inside a reduction are
      part of the reduction, not max_star_pairs.
    * muls counts correction-term multiplies: one per max* pair and
      seven per reduction in LINEAR_LOG mode, zero in the other modes.
      One-time setup work (e.g. interleaver generation) is not counted.
    * stream_reads is 3 per trellis stage (the three input streams,
      tail stages included); stream_writes is 2 per information stage
      (output LLR and extrinsic).
    """
    adds: int = 0
    subs: int = 0
    muls: int = 0
    max_star_pairs: int = 0
    llr_reduces: int = 0
    stream_reads: int = 0
    stream_writes: int = 0

    def __add__(self, other: "OpCounts") -> "OpCounts":
        out = OpCounts()
        out += self
        out += other
        return out

    def __iadd__(self, other: "OpCounts") -> "OpCounts":
        for name, value in vars(other).items():
            setattr(self, name, getattr(self, name) + value)
        return self

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class BranchMetrics:
    """The two stored branch-metric values of one stage (g3, g4 derived)."""
    g1: np.ndarray  # lu + lc1 + lc2
    g2: np.ndarray  # -lu - lc1 + lc2

    @property
    def g3(self):
        return -self.g2

    @property
    def g4(self):
        return -self.g1

    def table(self) -> np.ndarray:
        """Value table [g1, g2, -g2, -g1] indexed by the trellis wiring."""
        return np.stack([np.asarray(self.g1), np.asarray(self.g2),
                         -np.asarray(self.g2), -np.asarray(self.g1)], axis=-1)


def compute_branch_metrics(lu, lc1, lc2, ops: OpCounts | None = None) -> BranchMetrics:
    """Branch metrics of one stage (or a whole block) from its input LLRs."""
    lu = np.asarray(lu, dtype=np.float64)
    lc1 = np.asarray(lc1, dtype=np.float64)
    lc2 = np.asarray(lc2, dtype=np.float64)
    if ops is not None:
        stages = lu.size if lu.shape else 1
        ops.adds += 2 * stages
        ops.subs += 2 * stages
    return BranchMetrics(g1=lu + lc1 + lc2, g2=lc2 - lu - lc1)


def _kernel(metrics, gamma_table, state_idx, gamma_idx, mode, params):
    """Shared butterfly kernel: 8 two-way add-max* updates.

    metrics (..., 8) and gamma_table (..., 4) in, next metrics (..., 8)
    out.  The (8, 2) wiring tables select, per output state, its two
    source states and their branch-metric values; forward and backward
    directions differ only in those tables.
    """
    cand = metrics[..., state_idx] + gamma_table[..., gamma_idx]
    return max_star(cand[..., 0], cand[..., 1], mode, params)


def butterfly_update(prev_metrics, bm: BranchMetrics,
                     direction: Literal["forward", "backward"],
                     mode: MaxStarMode = MaxStarMode.MAX_LOG,
                     params: CorrectionParams = DEFAULT_CORRECTION,
                     ops: OpCounts | None = None) -> np.ndarray:
    """One trellis stage of the state-metric recursion.

    prev_metrics holds the eight previous-stage metrics (alpha when
    direction="forward", beta at the following stage when "backward");
    unreachable states carry the METRIC_NEG_INF sentinel.  Returns the
    eight next metrics, each the max* of its two candidate sums.
    """
    prev_metrics = np.asarray(prev_metrics, dtype=np.float64)
    if prev_metrics.shape[-1] != 8:
        raise ValueError("expected 8 state metrics in the last axis")
    if direction == "forward":
        sidx, gidx = _TRELLIS.fwd_prev, _TRELLIS.fwd_gamma_idx
    elif direction == "backward":
        sidx, gidx = _TRELLIS.bwd_next, _TRELLIS.bwd_gamma_idx
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if ops is not None:
        blocks = int(np.prod(prev_metrics.shape[:-1], dtype=np.int64))
        ops.adds += BUTTERFLY_ADDS * blocks
        ops.max_star_pairs += BUTTERFLY_MAX_STAR_PAIRS * blocks
    return _kernel(prev_metrics, bm.table(), sidx, gidx, mode, params)


def normalize(metrics) -> np.ndarray:
    """Stored form of a metric column: states 1..7 minus state 0.

    State 0 is the normalizer and is implicitly zero afterwards; storing
    seven of eight values saves 12.5% of metric memory.  Raises if the
    normalizer state is unreachable (cannot happen after stage 0, since
    state 0 always reaches itself).
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    if metrics.shape[-1] != 8:
        raise ValueError("expected 8 state metrics in the last axis")
    if np.any(metrics[..., 0] <= SENTINEL_CEILING):
        raise ValueError("normalizer state is unreachable")
    return metrics[..., 1:] - metrics[..., 0:1]


# ---------------------------------------------------------------------------
# forward-metric storage, instrumented so tests can audit peak usage

_allocation_log: list | None = None


@contextmanager
def track_metric_allocations():
    """Collect every MetricMatrix allocated inside the context.

    Yields a list of MetricMatrix instances; their stored_values_per_block
    add up to the peak stage-metric storage of a decode (the backward
    recursion allocates no per-stage storage, only 8-slot registers).
    """
    global _allocation_log
    prev = _allocation_log
    _allocation_log = log = []
    try:
        yield log
    finally:
        _allocation_log = prev


class MetricMatrix:
    """Normalized forward metrics: seven values per stage, state 0 omitted."""

    def __init__(self, batch_shape: tuple, n: int):
        self.n = n
        self.data = np.empty(batch_shape + (n, 7))
        if _allocation_log is not None:
            _allocation_log.append(self)

    @property
    def stored_values_per_block(self) -> int:
        return 7 * self.n

    def full_column(self, k) -> np.ndarray:
        """Reconstruct the 8-state column at stage k (state 0 is zero)."""
        col = self.data[..., k, :]
        return np.concatenate([np.zeros(col.shape[:-1] + (1,)), col], axis=-1)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SisoInput:
    """One constituent decoder's inputs.

    lu   (..., n)  systematic-plus-a-priori LLRs; multiplies the u label.
    lc1  (..., n)  first-coded-stream LLRs.  The first coded stream of a
                   systematic code is the information bit itself (c1 == u
                   on every edge), so its channel LLRs are conventionally
                   folded into lu and this slot stays zero; it is kept so
                   the recursions match the general two-coded-stream form.
    lc2  (..., n)  second-coded-stream LLRs: the parity stream.
    tail_lu, tail_lc1, tail_lc2  (..., 3)  the same three streams for the
                   termination stages.  Leave tail_lu=None for a block
                   without termination: the backward recursion then
                   starts uniform instead of pinned to state 0.
    """
    lu: np.ndarray
    lc2: np.ndarray
    lc1: np.ndarray | None = None
    tail_lu: np.ndarray | None = None
    tail_lc2: np.ndarray | None = None
    tail_lc1: np.ndarray | None = None

    def __post_init__(self):
        lu = np.asarray(self.lu, dtype=np.float64)
        lc2 = np.asarray(self.lc2, dtype=np.float64)
        lc1 = (np.zeros_like(lu) if self.lc1 is None
               else np.asarray(self.lc1, dtype=np.float64))
        if not (lu.shape == lc1.shape == lc2.shape):
            raise ValueError(f"input streams disagree in shape: "
                             f"{lu.shape}, {lc1.shape}, {lc2.shape}")
        to_check = [lu, lc1, lc2]
        object.__setattr__(self, "lu", lu)
        object.__setattr__(self, "lc1", lc1)
        object.__setattr__(self, "lc2", lc2)
        if self.tail_lu is not None:
            tail_shape = lu.shape[:-1] + (3,)
            tail_lu = np.asarray(self.tail_lu, dtype=np.float64)
            tail_lc2 = (np.zeros(tail_shape) if self.tail_lc2 is None
                        else np.asarray(self.tail_lc2, dtype=np.float64))
            tail_lc1 = (np.zeros(tail_shape) if self.tail_lc1 is None
                        else np.asarray(self.tail_lc1, dtype=np.float64))
            if not (tail_lu.shape == tail_lc1.shape == tail_lc2.shape == tail_shape):
                raise ValueError("tail LLRs must have shape (..., 3) matching the block batch")
            to_check += [tail_lu, tail_lc1, tail_lc2]
            object.__setattr__(self, "tail_lu", tail_lu)
            object.__setattr__(self, "tail_lc2", tail_lc2)
            object.__setattr__(self, "tail_lc1", tail_lc1)
        for a in to_check:
            if not np.all(np.isfinite(a)):
                raise ValueError("input LLRs must be finite")

    @property
    def n(self) -> int:
        return self.lu.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.lu.shape[:-1]


@dataclass
class SisoResult:
    llr_out: np.ndarray       # (..., n) a-posteriori LLRs of the info bits
    extrinsic: np.ndarray     # (..., n) llr_out - lu
    ops: OpCounts
    forward_metrics: MetricMatrix = field(repr=False, default=None)


def _window_schedule(n: int, window_len: int | None):
    if window_len is None:
        return [(0, n)]
    if window_len < 1:
        raise ValueError(f"window length must be >= 1, got {window_len}")
    return [(a, min(a + window_len, n)) for a in range(0, n, window_len)]


def _tail_boundary(inp: SisoInput, mode, params, normalize_metrics=True):
    """Backward metrics at the end of the information section.

    Runs the recursion from state 0 at the end of the tail through the
    three tail stages; with no tail information the boundary is uniform.
    """
    shape = inp.batch_shape + (8,)
    if inp.tail_lu is None:
        return np.zeros(shape)
    beta = np.full(shape, METRIC_NEG_INF)
    beta[..., 0] = 0.0
    tg = 0.5 * compute_branch_metrics(inp.tail_lu, inp.tail_lc1, inp.tail_lc2).table()
    for k in range(2, -1, -1):
        beta = _kernel(beta, tg[..., k, :], _TRELLIS.bwd_next,
                       _TRELLIS.bwd_gamma_idx, mode, params)
        if normalize_metrics:
            beta = beta - beta[..., 0:1]
    return beta


def siso_decode(inp: SisoInput, config, *, normalize_metrics: bool = True) -> SisoResult:
    """Decode one constituent code block (or a batch of them).

    Parameters
    ----------
    inp : SisoInput
    config : DecoderConfig
        Only mode, correction, window_len and acquisition_len are read.
    normalize_metrics : bool
        Debug toggle.  When False the per-stage state-0 subtraction is
        skipped; output LLRs are unchanged up to max* shift equivariance
        (bit-exact for MAX_LOG) but raw metrics grow with block length
        and an extra length-n vector is needed to remember the state-0
        metric -- exactly the storage the normalization trick avoids.

    Returns
    -------
    SisoResult
        llr_out[k] is the reduction over the eight u=+1 edges minus the
        reduction over the eight u=-1 edges of alpha + gamma + beta at
        stage k; extrinsic = llr_out - lu.
    """
    mode, params = config.mode, config.correction
    n = inp.n
    batch = inp.batch_shape
    blocks = int(np.prod(batch, dtype=np.int64))
    windows = _window_schedule(n, config.window_len)
    acq = config.acquisition_len

    # half-scale metrics: see module docstring
    gam = 0.5 * compute_branch_metrics(inp.lu, inp.lc1, inp.lc2).table()  # (..., n, 4)

    # Forward recursion.  Windows hand alpha across their shared
    # boundaries, so this is one continuous pass whatever the schedule.
    store = MetricMatrix(batch, n)
    alpha0 = None if normalize_metrics else np.empty(batch + (n,))
    alpha = np.full(batch + (8,), METRIC_NEG_INF)
    alpha[..., 0] = 0.0
    for k in range(n):
        store.data[..., k, :] = alpha[..., 1:]
        if alpha0 is not None:
            alpha0[..., k] = alpha[..., 0]
        alpha = _kernel(alpha, gam[..., k, :], _TRELLIS.fwd_prev,
                        _TRELLIS.fwd_gamma_idx, mode, params)
        if normalize_metrics:
            alpha = alpha - alpha[..., 0:1]

    e_start, e_end = _TRELLIS.edge_start, _TRELLIS.edge_end
    e_gidx = _TRELLIS.edge_gamma_idx
    pos_edges = np.where(_TRELLIS.edge_info == 0)[0]
    neg_edges = np.where(_TRELLIS.edge_info == 1)[0]

    llr = np.empty(batch + (n,))
    alpha_col = np.zeros(batch + (8,))
    tail_beta = _tail_boundary(inp, mode, params, normalize_metrics)

    total_acq_stages = 0
    for a, b in windows:
        if b == n:
            beta = tail_beta
        else:
            start = min(b + acq, n)
            beta = tail_beta if start == n else np.zeros(batch + (8,))
            for k in range(start - 1, b - 1, -1):
                beta = _kernel(beta, gam[..., k, :], _TRELLIS.bwd_next,
                               _TRELLIS.bwd_gamma_idx, mode, params)
                if normalize_metrics:
                    beta = beta - beta[..., 0:1]
            total_acq_stages += start - b
        # Fused backward/LLR loop: beta holds the stage-(k+1) column when
        # the stage-k LLR is formed, then one more butterfly retires it.
        for k in range(b - 1, a - 1, -1):
            alpha_col[..., 0] = 0.0 if alpha0 is None else alpha0[..., k]
            alpha_col[..., 1:] = store.data[..., k, :]
            g = gam[..., k, :]
            vals = alpha_col[..., e_start] + g[..., e_gidx] + beta[..., e_end]
            llr[..., k] = (max_star_reduce(vals[..., pos_edges], mode, params)
                           - max_star_reduce(vals[..., neg_edges], mode, params))
            beta = _kernel(beta, g, _TRELLIS.bwd_next,
                           _TRELLIS.bwd_gamma_idx, mode, params)
            if normalize_metrics:
                beta = beta - beta[..., 0:1]

    extrinsic = llr - inp.lu

    bwd_stages = n + total_acq_stages
    ops = OpCounts(
        adds=(2 * n + BUTTERFLY_ADDS * (n + bwd_stages) + 32 * n) * blocks,
        subs=(2 * n + (7 * (n + bwd_stages) if normalize_metrics else 0) + 2 * n) * blocks,
        max_star_pairs=BUTTERFLY_MAX_STAR_PAIRS * (n + bwd_stages) * blocks,
        llr_reduces=2 * n * blocks,
        stream_reads=3 * (n + (3 if inp.tail_lu is not None else 0)) * blocks,
        stream_writes=2 * n * blocks,
    )
    if mode is MaxStarMode.LINEAR_LOG:
        ops.muls = ops.max_star_pairs + 7 * ops.llr_reduces

    return SisoResult(llr_out=llr, extrinsic=extrinsic, ops=ops, forward_metrics=store)


def quantize_llrs(llrs, bits: int, frac_bits: int) -> np.ndarray:
    """Saturating round-to-nearest onto a two's-complement grid.

    The grid step is 2**-frac_bits; representable values span
    [-2**(bits-1), 2**(bits-1) - 1] grid steps.  Output stays on the
    real LLR scale.  Ties round to even (IEEE default).
    """
    if not 2 <= bits <= 16:
        raise ValueError(f"bits must be in [2, 16], got {bits}")
    if not 0 <= frac_bits < bits:
        raise ValueError(f"frac_bits must be in [0, bits), got {frac_bits}")
    step = 2.0 ** -frac_bits
    lo = -(2 ** (bits - 1)) * step
    hi = (2 ** (bits - 1) - 1) * step
    return np.clip(np.round(np.asarray(llrs, dtype=np.float64) / step) * step, lo, hi)
