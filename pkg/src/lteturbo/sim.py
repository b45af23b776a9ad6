"""Sweep driver: reproducible BER measurements and throughput reports.

Blocks of a sweep are distributed over worker threads in fixed chunks
and merged back in chunk order.  Since every block draws from its own
(seed, block-index) RNG stream, the thread count never changes a single
output bit -- the BER CSV is byte-identical for any --threads value.
Wall-clock timing is therefore kept out of the deterministic CSV; the
benchmark report is the place for timings.
"""

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .maxstar import MaxStarMode
from .qpp import params_for_block_size
from .siso import OpCounts
from .turbo import DecoderConfig, McResult, run_monte_carlo, time_decode

_CHUNK_BLOCKS = 256


@dataclass
class SimResult:
    """One measured sweep point."""
    snr_db: float
    mode: str
    iterations: int
    blocks: int
    info_bits: int
    bit_errors: int
    block_errors: int
    wall_time_s: float
    ops: OpCounts

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits if self.info_bits else 0.0

    @property
    def fer(self) -> float:
        return self.block_errors / self.blocks if self.blocks else 0.0

    @property
    def throughput_mbps(self) -> float:
        return self.info_bits / (self.wall_time_s * 1e6) if self.wall_time_s else 0.0


def run_ber_point(config: DecoderConfig, snr_db: float, num_blocks: int,
                  seed: int, threads: int = 1) -> SimResult:
    """Decode num_blocks blocks at one SNR, optionally across threads."""
    chunks = [(off, min(_CHUNK_BLOCKS, num_blocks - off))
              for off in range(0, num_blocks, _CHUNK_BLOCKS)]
    t0 = time.perf_counter()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda c: run_monte_carlo(config, snr_db, c[1], seed,
                                          block_offset=c[0]), chunks))
    else:
        parts = [run_monte_carlo(config, snr_db, count, seed, block_offset=off)
                 for off, count in chunks]
    elapsed = time.perf_counter() - t0
    total = McResult()
    for part in parts:
        total.merge(part)
    return SimResult(
        snr_db=snr_db, mode=config.mode.value, iterations=config.iterations,
        blocks=total.blocks, info_bits=total.info_bits,
        bit_errors=total.bit_errors, block_errors=total.block_errors,
        wall_time_s=elapsed, ops=total.ops)


def run_ber_sweep(config: DecoderConfig, snr_points, num_blocks: int,
                  seed: int, threads: int = 1) -> list[SimResult]:
    return [run_ber_point(config, snr, num_blocks, seed, threads)
            for snr in snr_points]


# Deterministic CSV schema of the `ber` subcommand.  Timing columns are
# deliberately absent: rows must be byte-identical across runs and
# thread counts for a fixed seed.
BER_CSV_COLUMNS = ("snr_db", "mode", "iterations", "blocks", "info_bits",
                   "bit_errors", "block_errors", "ber", "fer", "adds", "subs",
                   "muls", "max_star_pairs", "llr_reduces", "stream_reads",
                   "stream_writes")


def config_digest(config: DecoderConfig, num_blocks: int, seed: int,
                  snr_points) -> str:
    canon = (f"n={config.qpp.n};f1={config.qpp.f1};f2={config.qpp.f2};"
             f"mode={config.mode.value};iters={config.iterations};"
             f"window={config.window_len};acq={config.acquisition_len};"
             f"quant={config.quantization};corr=({config.correction.c},"
             f"{config.correction.t},{config.correction.a},{config.correction.t_lin});"
             f"blocks={num_blocks};seed={seed};"
             f"snr={','.join(repr(float(s)) for s in snr_points)}")
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_ber_csv(fh, results: list[SimResult], seed: int, digest: str) -> None:
    fh.write("# turbosim ber v1\n")
    fh.write(f"# seed={seed}\n")
    fh.write(f"# config={digest}\n")
    fh.write(",".join(BER_CSV_COLUMNS) + "\n")
    for r in results:
        ops = r.ops
        row = [repr(float(r.snr_db)), r.mode, str(r.iterations), str(r.blocks),
               str(r.info_bits), str(r.bit_errors), str(r.block_errors),
               repr(r.ber), repr(r.fer), str(ops.adds), str(ops.subs),
               str(ops.muls), str(ops.max_star_pairs), str(ops.llr_reduces),
               str(ops.stream_reads), str(ops.stream_writes)]
        fh.write(",".join(row) + "\n")


def run_benchmark(n: int, modes, iterations: int, num_blocks: int, seed: int,
                  snr_db: float = 1.0) -> list[str]:
    """Throughput report: one line per mode, plus the reduction count.

    Reports measured Mbps per full iteration (decode wall time divided by
    the iteration count); absolute numbers are machine-dependent, only
    the relative ordering of the modes is meaningful.
    """
    qpp = params_for_block_size(n)
    lines = [f"benchmark: n={n} blocks={num_blocks} iterations={iterations} "
             f"snr_db={snr_db} seed={seed}"]
    timings = {}
    for mode in modes:
        config = DecoderConfig(mode=mode, iterations=iterations, qpp=qpp)
        elapsed, mc = time_decode(config, snr_db, num_blocks, seed)
        per_iter_s = elapsed / iterations
        mbps = mc.info_bits / per_iter_s / 1e6
        timings[mode.value] = elapsed
        lines.append(
            f"mode={mode.value:<9} decode_s={elapsed:.3f} "
            f"mbps_per_iteration={mbps:.2f} ber={mc.ber:.3e}")
        if mode is modes[0]:
            per_iter_reduces = mc.ops.llr_reduces // (mc.blocks * iterations)
            lines.append(f"llr_reduces per full iteration at n={n}: {per_iter_reduces}")
    fastest = min(timings, key=timings.get)
    rel = " ".join(f"{m}={timings[m] / timings[fastest]:.2f}x" for m in timings)
    lines.append(f"relative decode time (vs {fastest}): {rel}")
    return lines


def parse_mode(name: str) -> MaxStarMode:
    return MaxStarMode.from_name(name)
