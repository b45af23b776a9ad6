"""Iterative turbo decoding: two SISO passes per full iteration.

One full iteration runs the first constituent decoder on the systematic
and parity1 streams, interleaves its extrinsic output, runs the second
constituent decoder on the interleaved systematic and parity2 streams,
and deinterleaves that extrinsic back as the next a-priori input.  The
first iteration starts with zero a-priori.  After the configured number
of iterations the decision statistic is

    final_llr = lu + extrinsic1 + deinterleave(extrinsic2)

and hard_bits[k] = 1 where final_llr[k] < 0 (positive LLR means bit 0).

All decode entry points accept a leading batch axis on the LLR arrays;
the Monte-Carlo helper below relies on it.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelConfig, ChannelLlrs, block_rng, bpsk_modulate, \
    llr_demap, serialize_codeword, split_llrs
from .maxstar import DEFAULT_CORRECTION, CorrectionParams, MaxStarMode
from .qpp import QppParams, inverse_permutation, permutation
from .siso import OpCounts, SisoInput, quantize_llrs, siso_decode
from .trellis import turbo_encode


@dataclass(frozen=True)
class DecoderConfig:
    """Everything the decoder needs to know about one configuration.

    qpp may be omitted for component-level (single SISO) use; the turbo
    entry points require it.  quantization, when set to (bits, frac_bits),
    applies saturating fixed-point rounding to the channel LLRs on entry
    and to each extrinsic stream as it is exchanged, approximating a
    fixed-point decoder's LLR memories.  window_len=None decodes each
    block as a single window, which is the exact-reference schedule.
    """
    mode: MaxStarMode = MaxStarMode.MAX_LOG
    iterations: int = 8
    qpp: QppParams | None = None
    correction: CorrectionParams = DEFAULT_CORRECTION
    window_len: int | None = None
    acquisition_len: int = 32
    quantization: tuple[int, int] | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("need at least one full iteration")
        if self.window_len is not None and self.window_len < 1:
            raise ValueError("window length must be >= 1")
        if self.acquisition_len < 0:
            raise ValueError("acquisition length must be >= 0")
        if self.quantization is not None:
            bits, frac = self.quantization
            quantize_llrs(0.0, bits, frac)  # validates the pair

    @property
    def n(self) -> int | None:
        return None if self.qpp is None else self.qpp.n

    def num_windows(self, n: int) -> int:
        if self.window_len is None:
            return 1
        return -(-n // self.window_len)


@dataclass
class DecodeResult:
    hard_bits: np.ndarray                 # (..., n) 0/1 decisions
    final_llrs: np.ndarray                # (..., n)
    ops: OpCounts
    half_iterations_run: int
    per_iteration_llrs: list | None = field(default=None, repr=False)


def _quantizer(config: DecoderConfig):
    if config.quantization is None:
        return lambda x: x
    bits, frac = config.quantization
    return lambda x: quantize_llrs(x, bits, frac)


def _iteration_stream(ch: ChannelLlrs, config: DecoderConfig,
                      normalize_metrics: bool = True):
    """Generator driving the iterative schedule.

    Yields (iteration_index, combined_llr, ops_this_iteration) after each
    full iteration, with combined_llr = lu + ext1 + deinterleaved ext2.
    """
    qpp = config.qpp
    if qpp is None:
        raise ValueError("turbo decoding needs DecoderConfig.qpp")
    if ch.n != qpp.n:
        raise ValueError(f"channel LLR length {ch.n} does not match "
                         f"interleaver block size {qpp.n}")
    quant = _quantizer(config)
    pi = permutation(qpp)
    ip = inverse_permutation(qpp)

    lu = quant(ch.lu)
    parity1 = quant(ch.parity1)
    parity2 = quant(ch.parity2)
    t1i, t1p = quant(ch.tail1_info), quant(ch.tail1_parity)
    t2i, t2p = quant(ch.tail2_info), quant(ch.tail2_parity)
    lu_perm = lu[..., pi]

    apriori = np.zeros_like(lu)
    iteration = 0
    while True:
        iteration += 1
        s1 = siso_decode(SisoInput(lu=lu + apriori, lc2=parity1,
                                   tail_lu=t1i, tail_lc2=t1p), config,
                         normalize_metrics=normalize_metrics)
        ext1 = quant(s1.extrinsic)
        s2 = siso_decode(SisoInput(lu=lu_perm + ext1[..., pi], lc2=parity2,
                                   tail_lu=t2i, tail_lc2=t2p), config,
                         normalize_metrics=normalize_metrics)
        ext2 = quant(s2.extrinsic)
        apriori = ext2[..., ip]
        yield iteration, lu + ext1 + apriori, s1.ops + s2.ops


def turbo_decode(ch: ChannelLlrs, config: DecoderConfig,
                 trace_iterations: bool = False, *,
                 normalize_metrics: bool = True) -> DecodeResult:
    """Run the fixed number of full iterations from config.

    With trace_iterations=True the result carries the combined LLR vector
    after every full iteration (per_iteration_llrs[i] for iteration i+1).
    normalize_metrics is the debug toggle of siso_decode, passed through
    so the two normalization settings can be compared end to end.
    """
    ops = OpCounts()
    trace = [] if trace_iterations else None
    stream = _iteration_stream(ch, config, normalize_metrics)
    for iteration, combined, it_ops in stream:
        ops += it_ops
        if trace is not None:
            trace.append(combined)
        if iteration == config.iterations:
            break
    return DecodeResult(
        hard_bits=(combined < 0).astype(np.uint8),
        final_llrs=combined,
        ops=ops,
        half_iterations_run=2 * config.iterations,
        per_iteration_llrs=trace)


def decode_to_convergence(ch: ChannelLlrs, config: DecoderConfig,
                          max_iters: int) -> DecodeResult:
    """Like turbo_decode, but stop once hard decisions repeat.

    Runs at most max_iters full iterations and stops after the first
    iteration whose hard decisions match the previous iteration's.  With
    no early stop the result equals turbo_decode with max_iters.
    """
    if max_iters < 1:
        raise ValueError("need at least one full iteration")
    ops = OpCounts()
    prev_bits = None
    stream = _iteration_stream(ch, config)
    for iteration, combined, it_ops in stream:
        ops += it_ops
        bits = (combined < 0).astype(np.uint8)
        if prev_bits is not None and np.array_equal(bits, prev_bits):
            break
        if iteration == max_iters:
            break
        prev_bits = bits
    return DecodeResult(
        hard_bits=bits,
        final_llrs=combined,
        ops=ops,
        half_iterations_run=2 * iteration,
        per_iteration_llrs=None)


# ---------------------------------------------------------------------------
# Monte-Carlo engine.  Block b of a run is fully determined by (seed, b):
# its Philox stream provides the information bits and then the channel
# noise, so results do not depend on batching or thread scheduling.

@dataclass
class McResult:
    """Error accumulators of a Monte-Carlo run (one SNR point)."""
    blocks: int = 0
    info_bits: int = 0
    bit_errors: int = 0
    block_errors: int = 0
    per_iteration_bit_errors: np.ndarray | None = None
    ops: OpCounts = field(default_factory=OpCounts)

    def merge(self, other: "McResult") -> None:
        self.blocks += other.blocks
        self.info_bits += other.info_bits
        self.bit_errors += other.bit_errors
        self.block_errors += other.block_errors
        if other.per_iteration_bit_errors is not None:
            if self.per_iteration_bit_errors is None:
                self.per_iteration_bit_errors = np.zeros_like(
                    other.per_iteration_bit_errors)
            self.per_iteration_bit_errors += other.per_iteration_bit_errors
        self.ops += other.ops

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits if self.info_bits else 0.0

    @property
    def fer(self) -> float:
        return self.block_errors / self.blocks if self.blocks else 0.0


def _default_batch_size(n: int) -> int:
    # keep the batched forward-metric store around a few hundred MB at most
    return int(np.clip(2 ** 18 // n, 1, 512))


def run_monte_carlo(config: DecoderConfig, snr_db: float, num_blocks: int,
                    seed: int, *, block_offset: int = 0,
                    batch_size: int | None = None,
                    per_iteration: bool = False) -> McResult:
    """Simulate and decode num_blocks random blocks at one Eb/N0 point.

    block_offset shifts the absolute block indices (and hence the RNG
    streams); sweep drivers use it to split work across threads without
    changing any result.
    """
    qpp = config.qpp
    if qpp is None:
        raise ValueError("Monte-Carlo runs need DecoderConfig.qpp")
    n = qpp.n
    sigma2 = ChannelConfig.for_block_size(n, snr_db).noise_variance
    batch = batch_size or _default_batch_size(n)
    total = McResult()
    if per_iteration:
        total.per_iteration_bit_errors = np.zeros(config.iterations, dtype=np.int64)

    for lo in range(0, num_blocks, batch):
        hi = min(lo + batch, num_blocks)
        b = hi - lo
        bits = np.empty((b, n), dtype=np.uint8)
        noise = np.empty((b, 3 * n + 12))
        for i, blk in enumerate(range(lo, hi)):
            rng = block_rng(seed, block_offset + blk)
            bits[i] = rng.integers(0, 2, n, dtype=np.uint8)
            noise[i] = rng.standard_normal(3 * n + 12)
        symbols = bpsk_modulate(serialize_codeword(turbo_encode(bits, qpp)))
        ch = split_llrs(llr_demap(symbols + np.sqrt(sigma2) * noise, sigma2), n)

        result = turbo_decode(ch, config, trace_iterations=per_iteration)
        errors = result.hard_bits != bits
        total.blocks += b
        total.info_bits += b * n
        total.bit_errors += int(errors.sum())
        total.block_errors += int(errors.any(axis=-1).sum())
        total.ops += result.ops
        if per_iteration:
            for i, llrs in enumerate(result.per_iteration_llrs):
                total.per_iteration_bit_errors[i] += int(
                    ((llrs < 0).astype(np.uint8) != bits).sum())
    return total


def ber_vs_iterations(snr_db: float, config: DecoderConfig, num_blocks: int,
                      seed: int) -> np.ndarray:
    """BER after each full iteration 1..config.iterations.

    Deterministic for a fixed seed; returns an array of length
    config.iterations.
    """
    mc = run_monte_carlo(config, snr_db, num_blocks, seed, per_iteration=True)
    return mc.per_iteration_bit_errors / mc.info_bits


def time_decode(config: DecoderConfig, snr_db: float, num_blocks: int,
                seed: int) -> tuple[float, McResult]:
    """Wall-clock seconds spent decoding num_blocks blocks, plus the stats.

    Encoding and channel simulation are excluded from the timing; only
    turbo_decode runs inside the measured window, one block at a time.
    """
    qpp = config.qpp
    n = qpp.n
    sigma2 = ChannelConfig.for_block_size(n, snr_db).noise_variance
    channels = []
    all_bits = []
    for blk in range(num_blocks):
        rng = block_rng(seed, blk)
        bits = rng.integers(0, 2, n, dtype=np.uint8)
        noise = rng.standard_normal(3 * n + 12)
        symbols = bpsk_modulate(serialize_codeword(turbo_encode(bits, qpp)))
        channels.append(split_llrs(llr_demap(symbols + np.sqrt(sigma2) * noise, sigma2), n))
        all_bits.append(bits)
    total = McResult()
    t0 = time.perf_counter()
    results = [turbo_decode(ch, config) for ch in channels]
    elapsed = time.perf_counter() - t0
    for bits, result in zip(all_bits, results):
        errors = result.hard_bits != bits
        total.blocks += 1
        total.info_bits += n
        total.bit_errors += int(errors.sum())
        total.block_errors += int(errors.any())
        total.ops += result.ops
    return elapsed, total
