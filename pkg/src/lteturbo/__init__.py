"""LTE turbo codec library.

Encoder, QPP interleaver, SISO component decoder with four selectable
max* kernels, iterative turbo decoder, AWGN link simulation and
operation-count accounting.  See README.md for a tour; the demos/
directory holds narrative scripts for each capability.
"""

from .channel import (ChannelConfig, ChannelLlrs, awgn, block_rng,
                      bpsk_modulate, llr_demap, serialize_codeword,
                      split_llrs, transmit)
from .maxstar import (DEFAULT_CORRECTION, METRIC_NEG_INF, CorrectionParams,
                      MaxStarMode, max_star, max_star_reduce)
from .qpp import (QppParams, block_sizes, inverse_permutation,
                  params_for_block_size, permutation, qpp_index)
from .siso import (BranchMetrics, MetricMatrix, OpCounts, SisoInput,
                   SisoResult, butterfly_update, compute_branch_metrics,
                   normalize, quantize_llrs, siso_decode,
                   track_metric_allocations)
from .trellis import (CodeWord, RscCodeword, TerminationBits, TrellisEdge,
                      TrellisSpec, lte_trellis, rsc_encode, turbo_encode)
from .turbo import (DecodeResult, DecoderConfig, McResult, ber_vs_iterations,
                    decode_to_convergence, run_monte_carlo, time_decode,
                    turbo_decode)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig", "ChannelLlrs", "awgn", "block_rng", "bpsk_modulate",
    "llr_demap", "serialize_codeword", "split_llrs", "transmit",
    "DEFAULT_CORRECTION", "METRIC_NEG_INF", "CorrectionParams", "MaxStarMode",
    "max_star", "max_star_reduce",
    "QppParams", "block_sizes", "inverse_permutation", "params_for_block_size",
    "permutation", "qpp_index",
    "BranchMetrics", "MetricMatrix", "OpCounts", "SisoInput", "SisoResult",
    "butterfly_update", "compute_branch_metrics", "normalize", "quantize_llrs",
    "siso_decode", "track_metric_allocations",
    "CodeWord", "RscCodeword", "TerminationBits", "TrellisEdge", "TrellisSpec",
    "lte_trellis", "rsc_encode", "turbo_encode",
    "DecodeResult", "DecoderConfig", "McResult", "ber_vs_iterations",
    "decode_to_convergence", "run_monte_carlo", "time_decode", "turbo_decode",
]
