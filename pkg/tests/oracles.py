"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written from scratch in plain scalar
Python (no shared code with src/): a bit-level shift-register encoder,
exhaustive a-posteriori / best-sequence LLR computations that enumerate
every information word, and a 16-edge state-metric update that walks the
edge list directly.
"""

import math

import numpy as np

# Shift register (r1, r2, r3), r1 newest.  Feedback taps D^2, D^3; the
# parity output XORs the new internal bit with taps D, D^3.
_FEEDBACK_TAPS = (0, 1, 1)
_FORWARD_TAPS = (1, 0, 1)


def _step(reg, bit):
    fb = sum(r * t for r, t in zip(reg, _FEEDBACK_TAPS)) % 2
    internal = (bit + fb) % 2
    parity = (internal + sum(r * t for r, t in zip(reg, _FORWARD_TAPS))) % 2
    return [internal, reg[0], reg[1]], parity


def _state_of(reg):
    return reg[0] * 4 + reg[1] * 2 + reg[2]


def ref_rsc_encode(bits):
    """Reference constituent encoder.

    Returns (parity, tail_info, tail_parity, states) where states lists
    the encoder state before each of the n + 3 steps plus the final one.
    """
    reg = [0, 0, 0]
    states = [0]
    parity = []
    for b in bits:
        reg, p = _step(reg, int(b))
        parity.append(p)
        states.append(_state_of(reg))
    tail_info, tail_parity = [], []
    for _ in range(3):
        b = (reg[1] + reg[2]) % 2
        reg, p = _step(reg, b)
        tail_info.append(b)
        tail_parity.append(p)
        states.append(_state_of(reg))
    return parity, tail_info, tail_parity, states


def _word_metric(bits, lu, lc1, lc2, tail_lu, tail_lc1, tail_lc2):
    """Log-likelihood exponent of one codeword path.

    With per-bit likelihoods P(b|L) ~ exp(x*L/2) for bipolar x, a word's
    joint exponent is half the sum of label-weighted LLRs along its path.
    """
    parity, tail_info, tail_parity, _ = ref_rsc_encode(bits)
    m = 0.0
    for k, (b, p) in enumerate(zip(bits, parity)):
        m += (1 - 2 * b) * (lu[k] + lc1[k]) + (1 - 2 * p) * lc2[k]
    for t, (b, p) in enumerate(zip(tail_info, tail_parity)):
        m += (1 - 2 * b) * (tail_lu[t] + tail_lc1[t]) + (1 - 2 * p) * tail_lc2[t]
    return 0.5 * m


def _logsumexp(values):
    m = max(values)
    return m + math.log(sum(math.exp(v - m) for v in values))


def exhaustive_llrs(lu, lc2, tail_lu, tail_lc2, lc1=None, tail_lc1=None,
                    best_sequence=False):
    """True per-bit LLRs by enumerating all 2^n information words.

    best_sequence=False sums the path exponentials per bit hypothesis
    (a-posteriori); best_sequence=True takes the best path per hypothesis
    instead, which is what a max-only decoder converges to.
    """
    n = len(lu)
    lc1 = [0.0] * n if lc1 is None else list(lc1)
    tail_lc1 = [0.0, 0.0, 0.0] if tail_lc1 is None else list(tail_lc1)
    metrics = []
    words = []
    for w in range(1 << n):
        bits = [(w >> k) & 1 for k in range(n)]
        metrics.append(_word_metric(bits, lu, lc1, lc2, tail_lu, tail_lc1, tail_lc2))
        words.append(bits)
    llrs = []
    for k in range(n):
        m0 = [m for m, bits in zip(metrics, words) if bits[k] == 0]
        m1 = [m for m, bits in zip(metrics, words) if bits[k] == 1]
        if best_sequence:
            llrs.append(max(m0) - max(m1))
        else:
            llrs.append(_logsumexp(m0) - _logsumexp(m1))
    return np.array(llrs)


def naive_state_update(trellis, prev_metrics, g1, g2, direction, max_star_fn):
    """State-metric update looping all 16 edges of the trellis spec."""
    gamma_values = [g1, g2, -g2, -g1]
    best = [None] * trellis.num_states
    for edge, gidx in zip(trellis.edges, trellis.edge_gamma_idx):
        if direction == "forward":
            src, dst = edge.start_state, edge.end_state
        else:
            src, dst = edge.end_state, edge.start_state
        cand = prev_metrics[src] + gamma_values[gidx]
        best[dst] = cand if best[dst] is None else max_star_fn(best[dst], cand)
    return np.array(best, dtype=float)


def dyadic(rng, shape, grid_bits=6, scale=4.0):
    """Random LLR-like values on a dyadic grid (exact float arithmetic)."""
    step = 2.0 ** -grid_bits
    return np.round(rng.normal(0.0, scale, shape) / step) * step
